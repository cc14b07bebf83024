#pragma once

#include "lexqa/corpus.hpp"
#include "lexqa/text_analysis.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexqa {

enum class Decision { No, Yes };
enum class DecisionRule { Exact, Unanimous, Threshold, Baseline };

std::string_view to_string(Decision decision) noexcept;
std::string_view to_string(DecisionRule rule) noexcept;
Decision decision_from_string(std::string_view text);
DecisionRule rule_from_string(std::string_view text);

/// Positive-class probabilities of each ensemble member for one query.
struct EntailmentVote {
    std::string qid;
    std::vector<std::string> member_ids;
    std::vector<double> member_probs;

    bool operator==(const EntailmentVote&) const = default;
};

/// Throws InvalidArgument unless ids and probabilities are parallel, non-empty and in [0, 1].
void validate_vote(const EntailmentVote& vote);

struct GateConfig {
    double approve_threshold = 0.53;
    AnalyzerConfig normalization;
};

/// Throws InvalidArgument unless approve_threshold lies in (0.5, 1].
void validate_gate(const GateConfig& config);

struct Verdict {
    Decision decision = Decision::No;
    DecisionRule rule = DecisionRule::Baseline;

    bool operator==(const Verdict&) const = default;
};

/// Yes when the normalized query token sequence occurs contiguously in some article.
/// An empty query never matches.
std::optional<Decision> exact_match_gate(std::string_view query, std::span<const Article> articles,
                                         const AnalyzerConfig& analyzer);

/// Members vote yes at p >= 0.5. Unanimous votes decide directly; on disagreement the
/// answer is yes iff the most confident approving member exceeds approve_threshold.
Verdict ensemble_decide(const EntailmentVote& vote, const GateConfig& config);

std::vector<Verdict> baseline_negative(const std::vector<QueryRecord>& queries);

/// Exact match against the query's gold articles (the whole corpus when it lists none),
/// then the ensemble vote. Throws MissingVote when neither applies.
std::map<std::string, Verdict> run_entailment(const std::vector<QueryRecord>& queries, const Corpus& corpus,
                                              const std::map<std::string, EntailmentVote>& votes,
                                              const GateConfig& config);

/// Vote JSONL: {"qid": ..., "members": [{"id": ..., "p_pos": ...}, ...]} per line.
std::map<std::string, EntailmentVote> read_votes(std::istream& in);
std::map<std::string, EntailmentVote> load_votes(const std::filesystem::path& path);
void write_votes(const std::map<std::string, EntailmentVote>& votes, std::ostream& out);

/// Decision TSV with header "qid\tdecision\trule", rows sorted by qid.
void write_decisions(const std::map<std::string, Verdict>& decisions, std::ostream& out);
std::map<std::string, Verdict> read_decisions(std::istream& in);
std::map<std::string, Verdict> load_decisions(const std::filesystem::path& path);

}  // namespace lexqa
