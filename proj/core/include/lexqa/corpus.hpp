#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexqa {

/// One statute article, the unit of retrieval.
struct Article {
    std::string id;
    std::optional<std::string> title;
    std::string body;
    std::size_t ordinal = 0;

    bool operator==(const Article&) const = default;
};

/// Text an article contributes to indexing and matching: title (if any) followed by body.
std::string article_text(const Article& article);

class Corpus {
  public:
    Corpus() = default;
    /// Validates the corpus invariants (unique non-empty ids, non-blank bodies,
    /// consecutive ordinals) and throws lexqa::Error on violation.
    Corpus(std::vector<Article> articles, std::string source_name);

    const std::vector<Article>& articles() const noexcept { return articles_; }
    const std::string& source_name() const noexcept { return source_name_; }
    std::size_t size() const noexcept { return articles_.size(); }
    bool empty() const noexcept { return articles_.empty(); }

    const Article& at(std::size_t ordinal) const;
    const Article* find(std::string_view id) const;

    bool operator==(const Corpus& other) const { return articles_ == other.articles_; }

  private:
    std::vector<Article> articles_;
    std::string source_name_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

struct SplitRules {
    /// ECMAScript patterns matched at the start of a line; the matched text,
    /// whitespace-collapsed, becomes the article id.
    std::vector<std::string> header_patterns{R"(Article\s+\d+(?:-\d+)?[a-z]?(?![\w-]))"};
    /// A whole line matching this, directly above a header, is taken as the article title
    /// (capture group 1). Empty disables title detection.
    std::string title_pattern{R"(\(([^()]*[A-Za-z][^()]*)\)\s*)"};
};

/// Splits a statute text into articles. Line endings are normalized to LF first.
/// Lines before the first header are discarded.
Corpus split_statute(std::string_view raw_text, const SplitRules& rules = {},
                     std::string source_name = {});

/// Renders a corpus back to statute text that split_statute parses to the same corpus.
std::string serialize_statute(const Corpus& corpus);

std::string normalize_line_endings(std::string_view text);

Corpus read_corpus_jsonl(std::istream& in, std::string source_name = {});
void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);

/// Loads a corpus from disk: `.jsonl` files use the corpus JSONL schema, anything
/// else is parsed as raw statute text.
Corpus load_corpus(const std::filesystem::path& path, const SplitRules& rules = {});

struct QueryRecord {
    std::string qid;
    std::string text;
    std::set<std::string> gold_article_ids;
    std::optional<bool> gold_entailment;

    bool operator==(const QueryRecord&) const = default;
};

enum class QueryFormat { Jsonl, PairXml };

std::vector<QueryRecord> parse_queries(std::istream& in, QueryFormat format);
std::vector<QueryRecord> load_queries(const std::filesystem::path& path, QueryFormat format);
std::vector<QueryRecord> load_queries(const std::filesystem::path& path);  // format by extension

void write_queries_jsonl(const std::vector<QueryRecord>& queries, std::ostream& out);
void save_queries(const std::vector<QueryRecord>& queries, const std::filesystem::path& path);

/// Throws UnknownArticle if any gold id does not resolve in the corpus.
void check_gold_ids(const std::vector<QueryRecord>& queries, const Corpus& corpus);

}  // namespace lexqa
