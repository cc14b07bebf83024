#pragma once

#include "lexqa/corpus.hpp"
#include "lexqa/entailment.hpp"
#include "lexqa/scored_hit.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lexqa {

/// One accepted article in a retrieval run.
struct RunEntry {
    std::string qid;
    std::string article_id;
    std::string tier;
    ScoreSource source = ScoreSource::Lexical;
    double score = 0.0;

    bool operator==(const RunEntry&) const = default;
};

/// Run TSV: header "qid\tarticle_id\ttier\tsource\tscore", one accepted article per row.
void write_run(const std::vector<RunEntry>& run, std::ostream& out);
std::vector<RunEntry> read_run(std::istream& in);
std::vector<RunEntry> load_run(const std::filesystem::path& path);

using Rankings = std::map<std::string, std::vector<std::string>>;
using GoldSets = std::map<std::string, std::set<std::string>>;

/// Ranking TSV: header "qid\trank\tarticle_id", ranks starting at 1.
void write_rankings(const Rankings& rankings, std::ostream& out);
Rankings read_rankings(std::istream& in);
Rankings load_rankings(const std::filesystem::path& path);

struct Prf2 {
    double precision = 0.0;
    double recall = 0.0;
    double f2 = 0.0;
};

/// 5PR / (4P + R), or 0 when the denominator vanishes.
double f2_score(double precision, double recall) noexcept;

/// Precision is 0 for an empty retrieved set. Gold must be non-empty.
Prf2 per_query_prf2(const std::set<std::string>& retrieved, const std::set<std::string>& gold);

/// Unweighted mean of each component. Throws EmptyRun on an empty list.
Prf2 macro_average(const std::vector<Prf2>& per_query);

double average_precision(const std::vector<std::string>& ranking, const std::set<std::string>& gold);

/// Means over the queries in `gold`; a query without a ranking contributes 0.
double mean_average_precision(const Rankings& rankings, const GoldSets& gold);
double recall_at_k(const Rankings& rankings, const GoldSets& gold, std::size_t k);

/// Gold sets of the queries with at least one gold article.
GoldSets gold_sets(const std::vector<QueryRecord>& queries);

struct RetrievalReport {
    Prf2 macro;
    std::size_t queries = 0;           // queries with non-empty gold
    std::size_t excluded_no_gold = 0;  // queries skipped for lacking gold
    std::optional<double> map;
    std::map<std::size_t, double> recall_at;
};

RetrievalReport evaluate_retrieval(const std::vector<RunEntry>& run, const std::vector<QueryRecord>& queries,
                                   const std::optional<Rankings>& rankings);

/// Per (tier, source) retrieval statistics. Percentages lie in [0, 100].
struct TierCoverageRow {
    std::string tier;
    ScoreSource source = ScoreSource::Lexical;
    std::size_t n_docs = 0;
    std::size_t n_queries = 0;
    double coverage_docs = 0.0;     // n_docs / all gold documents
    double coverage_queries = 0.0;  // n_queries / all queries with gold
    double precision = 0.0;
    double recall = 0.0;
    double f2 = 0.0;
};

/// Rows for every tier name and both sources (zero rows included), then the fallback rows.
/// P/R/F2 are macro averages over the queries with at least one acceptance in the row,
/// counting only that row's acceptances as retrieved.
std::vector<TierCoverageRow> tier_coverage_report(const std::vector<RunEntry>& run,
                                                  const std::vector<QueryRecord>& queries,
                                                  const std::vector<std::string>& tier_names);

/// Fraction of decisions matching the gold label. Throws MissingLabel for a decided qid
/// without a label and EmptyRun when there are no decisions.
double entailment_accuracy(const std::map<std::string, Verdict>& decisions, const std::vector<QueryRecord>& queries);

struct EvaluationReport {
    std::optional<RetrievalReport> retrieval;
    std::vector<TierCoverageRow> tiers;
    std::optional<double> accuracy;
    std::size_t decisions = 0;
};

/// Long-format TSV "section\tkey\tmetric\tvalue"; percentages with one decimal.
void write_report_tsv(const EvaluationReport& report, std::ostream& out);
void write_report_markdown(const EvaluationReport& report, std::ostream& out);

std::string percent(double fraction);

}  // namespace lexqa
