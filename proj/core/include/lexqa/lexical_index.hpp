#pragma once

#include "lexqa/corpus.hpp"
#include "lexqa/scored_hit.hpp"
#include "lexqa/text_analysis.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lexqa {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    bool operator==(const Bm25Params&) const = default;
};

struct Posting {
    std::uint32_t ordinal = 0;
    std::uint32_t tf = 0;

    bool operator==(const Posting&) const = default;
};

/// Immutable inverted index with Okapi BM25 scoring.
class InvertedIndex {
  public:
    static InvertedIndex build(const Corpus& corpus, const AnalyzerConfig& analyzer = {},
                               const Bm25Params& params = {});

    /// Persists `manifest.json` and `postings.bin` (little-endian u32 ordinal/tf pairs).
    void save(const std::filesystem::path& dir) const;
    static InvertedIndex load(const std::filesystem::path& dir);

    std::size_t doc_count() const noexcept { return doc_len_.size(); }
    std::uint32_t doc_len(std::size_t ordinal) const;
    double avg_doc_len() const noexcept { return avg_doc_len_; }
    const IdfTable& idf() const noexcept { return idf_; }
    const Bm25Params& params() const noexcept { return params_; }
    const AnalyzerConfig& analyzer() const noexcept { return analyzer_; }
    const std::vector<std::string>& article_ids() const noexcept { return article_ids_; }
    const std::map<std::string, std::vector<Posting>>& postings() const noexcept { return postings_; }

    std::span<const Posting> postings(const std::string& token) const;
    std::uint32_t term_frequency(const std::string& token, std::size_t ordinal) const;

    /// BM25 score of one article; every occurrence of a query token contributes a term.
    double score(const TokenStream& query, std::size_t ordinal) const;

    /// Top-k articles sharing at least one query token, by (score desc, ordinal asc).
    std::vector<ScoredHit> search(const TokenStream& query, std::size_t k) const;

  private:
    double term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len) const noexcept;

    AnalyzerConfig analyzer_;
    Bm25Params params_;
    std::map<std::string, std::vector<Posting>> postings_;
    std::vector<std::uint32_t> doc_len_;
    std::vector<std::string> article_ids_;
    double avg_doc_len_ = 0.0;
    IdfTable idf_;
};

inline InvertedIndex build_index(const Corpus& corpus, const AnalyzerConfig& analyzer = {},
                                 const Bm25Params& params = {}) {
    return InvertedIndex::build(corpus, analyzer, params);
}

inline double bm25_score(const InvertedIndex& index, const TokenStream& query, std::size_t ordinal) {
    return index.score(query, ordinal);
}

inline std::vector<ScoredHit> search_bm25(const InvertedIndex& index, const TokenStream& query,
                                          std::size_t k) {
    return index.search(query, k);
}

}  // namespace lexqa
