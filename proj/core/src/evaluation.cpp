#include "lexqa/evaluation.hpp"

#include "lexqa/error.hpp"
#include "lexqa/fusion.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lexqa {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        f.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return f;
}

template <typename RowFn>
void read_tsv(std::istream& in, std::string_view header_prefix, std::size_t fields, std::string_view what,
              RowFn&& row) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind(header_prefix, 0) == 0) continue;
        auto f = split_tabs(line);
        if (f.size() != fields)
            throw Error(ErrorCode::ParseError, std::string(what) + " line " + std::to_string(line_no) +
                                                   ": expected " + std::to_string(fields) + " fields");
        row(f, line_no);
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_double(const std::string& s, std::string_view what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw Error(ErrorCode::ParseError, std::string(what) + ": bad number '" + s + "'");
    return v;
}

template <typename Path, typename Fn>
auto with_file(const Path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return fn(in);
}

}  // namespace

void write_run(const std::vector<RunEntry>& run, std::ostream& out) {
    out << "qid\tarticle_id\ttier\tsource\tscore\n";
    for (const auto& e : run)
        out << e.qid << '\t' << e.article_id << '\t' << e.tier << '\t' << to_string(e.source) << '\t'
            << format_double(e.score) << '\n';
}

std::vector<RunEntry> read_run(std::istream& in) {
    std::vector<RunEntry> run;
    read_tsv(in, "qid\t", 5, "run", [&](const std::vector<std::string>& f, std::size_t) {
        run.push_back({f[0], f[1], f[2], score_source_from_string(f[3]), parse_double(f[4], "run score")});
    });
    return run;
}

std::vector<RunEntry> load_run(const std::filesystem::path& path) {
    return with_file(path, [](std::istream& in) { return read_run(in); });
}

void write_rankings(const Rankings& rankings, std::ostream& out) {
    out << "qid\trank\tarticle_id\n";
    for (const auto& [qid, ids] : rankings)
        for (std::size_t i = 0; i < ids.size(); ++i) out << qid << '\t' << i + 1 << '\t' << ids[i] << '\n';
}

Rankings read_rankings(std::istream& in) {
    Rankings out;
    read_tsv(in, "qid\t", 3, "ranking", [&](const std::vector<std::string>& f, std::size_t line_no) {
        auto& list = out[f[0]];
        if (f[1] != std::to_string(list.size() + 1))
            throw Error(ErrorCode::ParseError, "ranking line " + std::to_string(line_no) + ": ranks must run 1, 2, ...");
        list.push_back(f[2]);
    });
    return out;
}

Rankings load_rankings(const std::filesystem::path& path) {
    return with_file(path, [](std::istream& in) { return read_rankings(in); });
}

double f2_score(double precision, double recall) noexcept {
    const double denom = 4.0 * precision + recall;
    return denom > 0.0 ? 5.0 * precision * recall / denom : 0.0;
}

Prf2 per_query_prf2(const std::set<std::string>& retrieved, const std::set<std::string>& gold) {
    if (gold.empty()) throw Error(ErrorCode::InvalidArgument, "gold set must be non-empty");
    std::size_t hits = 0;
    for (const auto& id : retrieved) hits += gold.count(id);
    Prf2 m;
    m.precision = retrieved.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(retrieved.size());
    m.recall = static_cast<double>(hits) / static_cast<double>(gold.size());
    m.f2 = f2_score(m.precision, m.recall);
    return m;
}

Prf2 macro_average(const std::vector<Prf2>& per_query) {
    if (per_query.empty()) throw Error(ErrorCode::EmptyRun, "no queries to average");
    Prf2 sum;
    for (const auto& m : per_query) {
        sum.precision += m.precision;
        sum.recall += m.recall;
        sum.f2 += m.f2;
    }
    const double n = static_cast<double>(per_query.size());
    return {sum.precision / n, sum.recall / n, sum.f2 / n};
}

double average_precision(const std::vector<std::string>& ranking, const std::set<std::string>& gold) {
    if (gold.empty()) throw Error(ErrorCode::InvalidArgument, "gold set must be non-empty");
    std::set<std::string> seen;
    std::size_t hits = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (!seen.insert(ranking[i]).second) continue;  // repeated ids count once
        if (gold.contains(ranking[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(gold.size());
}

double mean_average_precision(const Rankings& rankings, const GoldSets& gold) {
    if (gold.empty()) throw Error(ErrorCode::EmptyRun, "no queries with gold articles");
    double sum = 0.0;
    for (const auto& [qid, g] : gold) {
        auto it = rankings.find(qid);
        if (it != rankings.end()) sum += average_precision(it->second, g);
    }
    return sum / static_cast<double>(gold.size());
}

double recall_at_k(const Rankings& rankings, const GoldSets& gold, std::size_t k) {
    if (gold.empty()) throw Error(ErrorCode::EmptyRun, "no queries with gold articles");
    double sum = 0.0;
    for (const auto& [qid, g] : gold) {
        auto it = rankings.find(qid);
        if (it == rankings.end()) continue;
        const auto& r = it->second;
        const std::set<std::string> top(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(std::min(k, r.size())));
        std::size_t hits = 0;
        for (const auto& id : top) hits += g.count(id);
        sum += static_cast<double>(hits) / static_cast<double>(g.size());
    }
    return sum / static_cast<double>(gold.size());
}

GoldSets gold_sets(const std::vector<QueryRecord>& queries) {
    GoldSets out;
    for (const auto& q : queries)
        if (!q.gold_article_ids.empty()) out.emplace(q.qid, q.gold_article_ids);
    return out;
}

RetrievalReport evaluate_retrieval(const std::vector<RunEntry>& run, const std::vector<QueryRecord>& queries,
                                   const std::optional<Rankings>& rankings) {
    const auto gold = gold_sets(queries);
    std::map<std::string, std::set<std::string>> retrieved;
    for (const auto& e : run) retrieved[e.qid].insert(e.article_id);

    RetrievalReport report;
    report.queries = gold.size();
    report.excluded_no_gold = queries.size() - gold.size();
    std::vector<Prf2> per_query;
    for (const auto& [qid, g] : gold) {
        auto it = retrieved.find(qid);
        per_query.push_back(per_query_prf2(it == retrieved.end() ? std::set<std::string>{} : it->second, g));
    }
    report.macro = macro_average(per_query);
    if (rankings) {
        report.map = mean_average_precision(*rankings, gold);
        for (std::size_t k : {5, 10, 30}) report.recall_at[k] = recall_at_k(*rankings, gold, k);
    }
    return report;
}

std::vector<TierCoverageRow> tier_coverage_report(const std::vector<RunEntry>& run,
                                                  const std::vector<QueryRecord>& queries,
                                                  const std::vector<std::string>& tier_names) {
    const auto gold = gold_sets(queries);
    std::size_t gold_docs = 0;
    for (const auto& [qid, g] : gold) gold_docs += g.size();

    auto names = tier_names;
    names.emplace_back(kFallbackTier);
    std::vector<TierCoverageRow> rows;
    for (const auto& name : names) {
        for (auto source : {ScoreSource::Lexical, ScoreSource::Embedding}) {
            TierCoverageRow row{name, source};
            std::map<std::string, std::set<std::string>> per_query;
            for (const auto& e : run) {
                if (e.tier != name || e.source != source || !gold.contains(e.qid)) continue;
                per_query[e.qid].insert(e.article_id);
                ++row.n_docs;
            }
            row.n_queries = per_query.size();
            if (gold_docs > 0) row.coverage_docs = 100.0 * static_cast<double>(row.n_docs) / static_cast<double>(gold_docs);
            if (!gold.empty())
                row.coverage_queries = 100.0 * static_cast<double>(row.n_queries) / static_cast<double>(gold.size());
            if (!per_query.empty()) {
                std::vector<Prf2> m;
                for (const auto& [qid, ids] : per_query) m.push_back(per_query_prf2(ids, gold.at(qid)));
                const auto avg = macro_average(m);
                row.precision = 100.0 * avg.precision;
                row.recall = 100.0 * avg.recall;
                row.f2 = 100.0 * avg.f2;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

double entailment_accuracy(const std::map<std::string, Verdict>& decisions, const std::vector<QueryRecord>& queries) {
    if (decisions.empty()) throw Error(ErrorCode::EmptyRun, "no entailment decisions");
    std::map<std::string, bool> labels;
    for (const auto& q : queries)
        if (q.gold_entailment) labels.emplace(q.qid, *q.gold_entailment);
    std::size_t correct = 0;
    for (const auto& [qid, v] : decisions) {
        auto it = labels.find(qid);
        if (it == labels.end()) throw Error(ErrorCode::MissingLabel, qid);
        correct += (v.decision == Decision::Yes) == it->second ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(decisions.size());
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * fraction);
    return buf;
}

namespace {

std::string one_decimal(double pct) { return percent(pct / 100.0); }

std::string row_key(const TierCoverageRow& r) { return r.tier + "/" + std::string(to_string(r.source)); }

}  // namespace

void write_report_tsv(const EvaluationReport& report, std::ostream& out) {
    out << "section\tkey\tmetric\tvalue\n";
    if (report.retrieval) {
        const auto& r = *report.retrieval;
        out << "retrieval\tall\tqueries\t" << r.queries << '\n';
        out << "retrieval\tall\texcluded_no_gold\t" << r.excluded_no_gold << '\n';
        out << "retrieval\tall\tF2\t" << percent(r.macro.f2) << '\n';
        out << "retrieval\tall\tP\t" << percent(r.macro.precision) << '\n';
        out << "retrieval\tall\tR\t" << percent(r.macro.recall) << '\n';
        if (r.map) out << "retrieval\tall\tMAP\t" << percent(*r.map) << '\n';
        for (const auto& [k, v] : r.recall_at) out << "retrieval\tall\tR@" << k << '\t' << percent(v) << '\n';
    }
    for (const auto& row : report.tiers) {
        const auto key = row_key(row);
        out << "tier\t" << key << "\tN\t" << row.n_docs << '\n';
        out << "tier\t" << key << "\tqueries\t" << row.n_queries << '\n';
        out << "tier\t" << key << "\tC_docs\t" << one_decimal(row.coverage_docs) << '\n';
        out << "tier\t" << key << "\tC_queries\t" << one_decimal(row.coverage_queries) << '\n';
        out << "tier\t" << key << "\tP\t" << one_decimal(row.precision) << '\n';
        out << "tier\t" << key << "\tR\t" << one_decimal(row.recall) << '\n';
        out << "tier\t" << key << "\tF2\t" << one_decimal(row.f2) << '\n';
    }
    if (report.accuracy) {
        out << "entailment\tall\tdecisions\t" << report.decisions << '\n';
        out << "entailment\tall\tA\t" << percent(*report.accuracy) << '\n';
    }
}

void write_report_markdown(const EvaluationReport& report, std::ostream& out) {
    bool first = true;
    auto section = [&](std::string_view title) {
        if (!first) out << '\n';
        first = false;
        out << "## " << title << "\n\n";
    };
    if (!report.tiers.empty()) {
        section("Retrieval coverage by confidence tier");
        std::vector<std::string> names;
        for (const auto& r : report.tiers)
            if (std::find(names.begin(), names.end(), r.tier) == names.end()) names.push_back(r.tier);
        auto find = [&](const std::string& tier, ScoreSource s) -> const TierCoverageRow& {
            return *std::find_if(report.tiers.begin(), report.tiers.end(),
                                 [&](const TierCoverageRow& r) { return r.tier == tier && r.source == s; });
        };
        out << "| Metric |";
        for (const auto& n : names) out << ' ' << n << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < names.size(); ++i) out << "---:|";
        out << '\n';
        struct Line {
            std::string label;
            std::string (*cell)(const TierCoverageRow&);
        };
        const Line lines[] = {
            {"N", [](const TierCoverageRow& r) { return std::to_string(r.n_docs); }},
            {"C", [](const TierCoverageRow& r) { return one_decimal(r.coverage_docs); }},
            {"C_q", [](const TierCoverageRow& r) { return one_decimal(r.coverage_queries); }},
            {"P", [](const TierCoverageRow& r) { return one_decimal(r.precision); }},
            {"R", [](const TierCoverageRow& r) { return one_decimal(r.recall); }},
            {"F2", [](const TierCoverageRow& r) { return one_decimal(r.f2); }},
        };
        for (const auto& line : lines) {
            for (auto s : {ScoreSource::Lexical, ScoreSource::Embedding}) {
                out << "| " << line.label << '_' << to_string(s) << " |";
                for (const auto& n : names) out << ' ' << line.cell(find(n, s)) << " |";
                out << '\n';
            }
        }
        out << "\nC is documents accepted at the tier over all gold documents; C_q is queries with an "
               "acceptance at the tier over all queries with gold articles.\n";
    }
    if (report.retrieval) {
        const auto& r = *report.retrieval;
        section("Retrieval (macro-averaged, percent)");
        out << "| Metric | Value |\n|---|---:|\n";
        out << "| F2 | " << percent(r.macro.f2) << " |\n";
        out << "| P | " << percent(r.macro.precision) << " |\n";
        out << "| R | " << percent(r.macro.recall) << " |\n";
        if (r.map) out << "| MAP | " << percent(*r.map) << " |\n";
        for (const auto& [k, v] : r.recall_at) out << "| R@" << k << " | " << percent(v) << " |\n";
        out << "\nQueries evaluated: " << r.queries << " (" << r.excluded_no_gold << " without gold excluded).\n";
    }
    if (report.accuracy) {
        section("Entailment (percent)");
        out << "| Metric | Value |\n|---|---:|\n";
        out << "| A | " << percent(*report.accuracy) << " |\n";
        out << "\nDecisions: " << report.decisions << ".\n";
    }
}

}  // namespace lexqa
