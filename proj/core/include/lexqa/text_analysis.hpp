#pragma once

#include "lexqa/corpus.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lexqa {

enum class StemmerKind { None, Snowball };

std::string_view to_string(StemmerKind kind) noexcept;
StemmerKind stemmer_from_string(std::string_view name);

struct AnalyzerConfig {
    bool lowercase = true;
    bool split_hyphens = false;
    StemmerKind stemmer = StemmerKind::None;

    bool operator==(const AnalyzerConfig&) const = default;
};

struct TokenStream {
    std::vector<std::string> tokens;
    std::vector<std::string> surface_forms;  // parallel to tokens, pre-normalization

    std::size_t size() const noexcept { return tokens.size(); }
    bool empty() const noexcept { return tokens.empty(); }
};

/// Segments text into word tokens. Letters, digits, and internal apostrophes form
/// words; hyphens join words unless config.split_hyphens. Stemming is applied when
/// config.stemmer is not None.
TokenStream tokenize(std::string_view text, const AnalyzerConfig& config = {});

/// One pass of the Snowball English (Porter2) stemmer over a lowercase token.
std::string snowball_english(std::string_view token);

/// Canonical stem: snowball_english iterated to a fixed point, so stem(stem(t)) == stem(t).
std::string stem(std::string_view token);

/// Smoothed BM25 idf: ln(1 + (N - df + 0.5) / (df + 0.5)).
double smoothed_idf(std::size_t doc_count, std::size_t df) noexcept;

class IdfTable {
  public:
    IdfTable() = default;
    IdfTable(std::size_t doc_count, std::map<std::string, std::size_t> df);

    std::size_t doc_count() const noexcept { return doc_count_; }
    const std::map<std::string, std::size_t>& df() const noexcept { return df_; }

    bool contains(const std::string& token) const { return df_.contains(token); }
    std::size_t df(const std::string& token) const;
    /// Idf of a token; tokens absent from the table get smoothed_idf(N, 0).
    double idf(const std::string& token) const;
    double default_idf() const noexcept { return smoothed_idf(doc_count_, 0); }

    /// Adds one document's tokens (df counts documents, not occurrences).
    void add_document(const TokenStream& doc);

  private:
    std::size_t doc_count_ = 0;
    std::map<std::string, std::size_t> df_;
};

IdfTable build_idf(const Corpus& corpus, const AnalyzerConfig& config = {});

}  // namespace lexqa
