#include "lexqa/entailment.hpp"

#include "lexqa/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lexqa {

std::string_view to_string(Decision decision) noexcept { return decision == Decision::Yes ? "YES" : "NO"; }

std::string_view to_string(DecisionRule rule) noexcept {
    switch (rule) {
        case DecisionRule::Exact: return "exact";
        case DecisionRule::Unanimous: return "unanimous";
        case DecisionRule::Threshold: return "threshold";
        case DecisionRule::Baseline: return "baseline";
    }
    return "baseline";
}

Decision decision_from_string(std::string_view text) {
    if (text == "YES" || text == "Y") return Decision::Yes;
    if (text == "NO" || text == "N") return Decision::No;
    throw Error(ErrorCode::ParseError, "unknown decision '" + std::string(text) + "'");
}

DecisionRule rule_from_string(std::string_view text) {
    for (auto r : {DecisionRule::Exact, DecisionRule::Unanimous, DecisionRule::Threshold, DecisionRule::Baseline})
        if (to_string(r) == text) return r;
    throw Error(ErrorCode::ParseError, "unknown decision rule '" + std::string(text) + "'");
}

void validate_vote(const EntailmentVote& vote) {
    if (vote.member_probs.empty() || vote.member_probs.size() != vote.member_ids.size())
        throw Error(ErrorCode::InvalidArgument, "vote for " + vote.qid + " needs parallel, non-empty members");
    for (double p : vote.member_probs)
        if (!(p >= 0.0 && p <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "vote for " + vote.qid + " has a probability outside [0, 1]");
}

void validate_gate(const GateConfig& config) {
    if (!(config.approve_threshold > 0.5 && config.approve_threshold <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "approve_threshold must lie in (0.5, 1]");
}

std::optional<Decision> exact_match_gate(std::string_view query, std::span<const Article> articles,
                                         const AnalyzerConfig& analyzer) {
    const auto q = tokenize(query, analyzer).tokens;
    if (q.empty()) return std::nullopt;
    for (const auto& a : articles) {
        const auto doc = tokenize(article_text(a), analyzer).tokens;
        if (std::search(doc.begin(), doc.end(), q.begin(), q.end()) != doc.end()) return Decision::Yes;
    }
    return std::nullopt;
}

Verdict ensemble_decide(const EntailmentVote& vote, const GateConfig& config) {
    validate_vote(vote);
    const auto& p = vote.member_probs;
    const auto approving = std::count_if(p.begin(), p.end(), [](double x) { return x >= 0.5; });
    if (approving == static_cast<std::ptrdiff_t>(p.size())) return {Decision::Yes, DecisionRule::Unanimous};
    if (approving == 0) return {Decision::No, DecisionRule::Unanimous};
    double best = 0.0;
    for (double x : p)
        if (x >= 0.5) best = std::max(best, x);
    return {best > config.approve_threshold ? Decision::Yes : Decision::No, DecisionRule::Threshold};
}

std::vector<Verdict> baseline_negative(const std::vector<QueryRecord>& queries) {
    return std::vector<Verdict>(queries.size(), Verdict{Decision::No, DecisionRule::Baseline});
}

std::map<std::string, Verdict> run_entailment(const std::vector<QueryRecord>& queries, const Corpus& corpus,
                                              const std::map<std::string, EntailmentVote>& votes,
                                              const GateConfig& config) {
    validate_gate(config);
    std::map<std::string, Verdict> out;
    for (const auto& q : queries) {
        std::vector<Article> scope;
        for (const auto& id : q.gold_article_ids) {
            const auto* a = corpus.find(id);
            if (!a) throw Error(ErrorCode::UnknownArticle, q.qid + " cites " + id);
            scope.push_back(*a);
        }
        const std::span<const Article> articles = scope.empty() ? std::span<const Article>(corpus.articles())
                                                                : std::span<const Article>(scope);
        if (exact_match_gate(q.text, articles, config.normalization)) {
            out[q.qid] = {Decision::Yes, DecisionRule::Exact};
            continue;
        }
        auto it = votes.find(q.qid);
        if (it == votes.end()) throw Error(ErrorCode::MissingVote, q.qid);
        out[q.qid] = ensemble_decide(it->second, config);
    }
    return out;
}

std::map<std::string, EntailmentVote> read_votes(std::istream& in) {
    std::map<std::string, EntailmentVote> votes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = "votes line " + std::to_string(line_no);
        EntailmentVote v;
        try {
            const auto j = nlohmann::json::parse(line);
            v.qid = j.at("qid").get<std::string>();
            for (const auto& m : j.at("members")) {
                v.member_ids.push_back(m.at("id").get<std::string>());
                v.member_probs.push_back(m.at("p_pos").get<double>());
            }
        } catch (const nlohmann::json::out_of_range& e) {
            throw Error(ErrorCode::MissingField, where + ": " + e.what());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, where + ": " + e.what());
        }
        try {
            validate_vote(v);
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseError, where + ": " + e.what());
        }
        const auto qid = v.qid;
        if (!votes.emplace(qid, std::move(v)).second)
            throw Error(ErrorCode::ParseError, where + ": duplicate qid " + qid);
    }
    return votes;
}

std::map<std::string, EntailmentVote> load_votes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return read_votes(in);
}

void write_votes(const std::map<std::string, EntailmentVote>& votes, std::ostream& out) {
    for (const auto& [qid, v] : votes) {
        nlohmann::ordered_json j;
        j["qid"] = qid;
        j["members"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < v.member_ids.size(); ++i)
            j["members"].push_back({{"id", v.member_ids[i]}, {"p_pos", v.member_probs[i]}});
        out << j.dump() << '\n';
    }
}

void write_decisions(const std::map<std::string, Verdict>& decisions, std::ostream& out) {
    out << "qid\tdecision\trule\n";
    for (const auto& [qid, v] : decisions) out << qid << '\t' << to_string(v.decision) << '\t' << to_string(v.rule) << '\n';
}

std::map<std::string, Verdict> read_decisions(std::istream& in) {
    std::map<std::string, Verdict> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("qid\t", 0) == 0)) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, '\t');) f.push_back(cell);
        if (f.size() != 3) throw Error(ErrorCode::ParseError, "decisions line " + std::to_string(line_no));
        if (!out.emplace(f[0], Verdict{decision_from_string(f[1]), rule_from_string(f[2])}).second)
            throw Error(ErrorCode::ParseError, "duplicate qid " + f[0] + " in decisions");
    }
    return out;
}

std::map<std::string, Verdict> load_decisions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return read_decisions(in);
}

}  // namespace lexqa
