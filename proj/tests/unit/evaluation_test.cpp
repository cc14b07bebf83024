#include "error_matchers.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "lexqa/evaluation.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace lexqa;

namespace {

using Ids = std::set<std::string>;

std::vector<QueryRecord> three_queries() {
    return {{"Q1", "one", {"a", "b"}, true}, {"Q2", "two", {"c"}, false}, {"Q3", "three", {}, true}};
}

RunEntry entry(std::string qid, std::string id, std::string tier, ScoreSource s = ScoreSource::Embedding) {
    return {std::move(qid), std::move(id), std::move(tier), s, 1.0};
}

const TierCoverageRow& row(const std::vector<TierCoverageRow>& rows, const std::string& tier, ScoreSource s) {
    for (const auto& r : rows)
        if (r.tier == tier && r.source == s) return r;
    throw std::logic_error("missing row " + tier);
}

}  // namespace

TEST(Prf2, Examples) {
    const auto m = per_query_prf2({"a", "b"}, {"a", "c"});
    EXPECT_DOUBLE_EQ(m.precision, 0.5);
    EXPECT_DOUBLE_EQ(m.recall, 0.5);
    EXPECT_DOUBLE_EQ(m.f2, 0.5);
    const auto empty = per_query_prf2({}, {"a"});
    EXPECT_EQ(empty.precision, 0.0);
    EXPECT_EQ(empty.recall, 0.0);
    EXPECT_EQ(empty.f2, 0.0);
    // P = 1/3, R = 1: F2 = 5/3 / (4/3 + 1)
    EXPECT_NEAR(per_query_prf2({"a", "x", "y"}, {"a"}).f2, (5.0 / 3.0) / (7.0 / 3.0), 1e-15);
    EXPECT_EQ(code_of([] { per_query_prf2({"a"}, {}); }), ErrorCode::InvalidArgument);
}

TEST(Prf2, MatchesOracle) {
    std::mt19937_64 rng(3);
    const std::vector<std::string> pool{"a", "b", "c", "d", "e", "f"};
    for (int i = 0; i < 500; ++i) {
        std::vector<std::string> r, g;
        for (const auto& id : pool) {
            if (rng() % 3 == 0) r.push_back(id);
            if (rng() % 3 == 0) g.push_back(id);
        }
        if (g.empty()) continue;
        const auto got = per_query_prf2(Ids(r.begin(), r.end()), Ids(g.begin(), g.end()));
        const auto want = oracle::prf2(r, g);
        EXPECT_NEAR(got.precision, want.p, 1e-15);
        EXPECT_NEAR(got.recall, want.r, 1e-15);
        EXPECT_NEAR(got.f2, want.f2, 1e-15);
    }
}

TEST(Macro, AveragesEachComponent) {
    const auto m = macro_average({{1, 0, 0}, {0, 1, 0.5}});
    EXPECT_DOUBLE_EQ(m.precision, 0.5);
    EXPECT_DOUBLE_EQ(m.recall, 0.5);
    EXPECT_DOUBLE_EQ(m.f2, 0.25);
    EXPECT_EQ(code_of([] { macro_average({}); }), ErrorCode::EmptyRun);
}

TEST(AveragePrecision, Examples) {
    EXPECT_DOUBLE_EQ(average_precision({"x", "a"}, {"a"}), 0.5);
    EXPECT_DOUBLE_EQ(average_precision({"a", "x", "b"}, {"a", "b"}), (1.0 + 2.0 / 3.0) / 2.0);
    EXPECT_DOUBLE_EQ(average_precision({"x"}, {"a"}), 0.0);
    EXPECT_DOUBLE_EQ(average_precision({"a", "a"}, {"a", "b"}), 0.5);
}

TEST(AveragePrecision, MatchesOracle) {
    std::mt19937_64 rng(4);
    std::vector<std::string> pool{"a", "b", "c", "d", "e", "f", "g"};
    for (int i = 0; i < 300; ++i) {
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::vector<std::string> ranking(pool.begin(), pool.begin() + static_cast<long>(rng() % 8));
        std::vector<std::string> gold;
        for (const auto& id : pool)
            if (rng() % 3 == 0) gold.push_back(id);
        if (gold.empty()) continue;
        EXPECT_NEAR(average_precision(ranking, Ids(gold.begin(), gold.end())), oracle::ap(ranking, gold), 1e-15);
        for (std::size_t k : {1, 3, 5, 10}) {
            const Rankings rk{{"Q", ranking}};
            const GoldSets gs{{"Q", Ids(gold.begin(), gold.end())}};
            EXPECT_NEAR(recall_at_k(rk, gs, k), oracle::recall_at(ranking, gold, k), 1e-15);
        }
    }
}

TEST(RankingMetrics, MissingRankingCountsZeroAndRecallIsMonotone) {
    const Rankings r{{"Q1", {"b", "x", "a"}}};
    const GoldSets g{{"Q1", {"a", "b"}}, {"Q2", {"c"}}};
    EXPECT_DOUBLE_EQ(mean_average_precision(r, g), (1.0 + 2.0 / 3.0) / 2.0 / 2.0);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 5; ++k) {
        const double now = recall_at_k(r, g, k);
        EXPECT_GE(now, prev);
        prev = now;
    }
    EXPECT_DOUBLE_EQ(prev, 0.5);
    EXPECT_EQ(code_of([&] { mean_average_precision(r, {}); }), ErrorCode::EmptyRun);
}

TEST(Retrieval, ExcludesQueriesWithoutGold) {
    const std::vector<RunEntry> run{entry("Q1", "a", "high"), entry("Q3", "z", "high")};
    const auto rep = evaluate_retrieval(run, three_queries(), std::nullopt);
    EXPECT_EQ(rep.queries, 2u);
    EXPECT_EQ(rep.excluded_no_gold, 1u);
    // Q1: P 1, R 0.5; Q2 retrieved nothing
    EXPECT_DOUBLE_EQ(rep.macro.precision, 0.5);
    EXPECT_DOUBLE_EQ(rep.macro.recall, 0.25);
    EXPECT_FALSE(rep.map);
}

TEST(TierCoverage, RowsIncludeZeroTiersAndFallback) {
    const std::vector<RunEntry> run{entry("Q1", "a", "high"), entry("Q1", "x", "medium", ScoreSource::Lexical),
                                    entry("Q2", "c", "fallback")};
    const auto rows = tier_coverage_report(run, three_queries(), {"high", "medium", "low"});
    ASSERT_EQ(rows.size(), 8u);
    const auto& high = row(rows, "high", ScoreSource::Embedding);
    EXPECT_EQ(high.n_docs, 1u);
    EXPECT_EQ(high.n_queries, 1u);
    EXPECT_NEAR(high.coverage_docs, 100.0 / 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(high.coverage_queries, 50.0);
    EXPECT_DOUBLE_EQ(high.precision, 100.0);
    EXPECT_DOUBLE_EQ(high.recall, 50.0);
    const auto& med = row(rows, "medium", ScoreSource::Lexical);
    EXPECT_DOUBLE_EQ(med.precision, 0.0);
    const auto& low = row(rows, "low", ScoreSource::Embedding);
    EXPECT_EQ(low.n_docs, 0u);
    EXPECT_EQ(low.precision, 0.0);
    EXPECT_EQ(row(rows, "fallback", ScoreSource::Embedding).n_docs, 1u);
    for (const auto& r : rows) {
        for (double v : {r.coverage_docs, r.coverage_queries, r.precision, r.recall, r.f2}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 100.0);
        }
    }
}

TEST(TierCoverage, PerfectTierPrintsHundred) {
    const std::vector<RunEntry> run{entry("Q1", "a", "high"), entry("Q1", "b", "high"), entry("Q2", "c", "high")};
    EvaluationReport report;
    report.tiers = tier_coverage_report(run, three_queries(), {"high"});
    std::ostringstream out;
    write_report_tsv(report, out);
    const auto tsv = out.str();
    for (const char* metric : {"C_docs", "C_queries", "P", "R", "F2"})
        EXPECT_NE(tsv.find(std::string("tier\thigh/emb\t") + metric + "\t100.0\n"), std::string::npos) << metric;
    EXPECT_NE(tsv.find("tier\thigh/bm25\tP\t0.0\n"), std::string::npos);
}

TEST(Accuracy, CountsMatchesAndRequiresLabels) {
    const std::map<std::string, Verdict> d{{"Q1", {Decision::Yes, DecisionRule::Exact}},
                                           {"Q2", {Decision::Yes, DecisionRule::Threshold}}};
    EXPECT_DOUBLE_EQ(entailment_accuracy(d, three_queries()), 0.5);
    auto unlabeled = three_queries();
    unlabeled[1].gold_entailment.reset();
    EXPECT_EQ(code_of([&] { entailment_accuracy(d, unlabeled); }), ErrorCode::MissingLabel);
    EXPECT_EQ(code_of([&] { entailment_accuracy({}, three_queries()); }), ErrorCode::EmptyRun);
}

TEST(Accuracy, AllNoBaselineOnFixture) {
    const auto queries = fixtures::queries();
    std::map<std::string, Verdict> d;
    std::size_t negatives = 0;
    for (const auto& q : queries) {
        d[q.qid] = {Decision::No, DecisionRule::Baseline};
        negatives += *q.gold_entailment ? 0 : 1;
    }
    EXPECT_DOUBLE_EQ(entailment_accuracy(d, queries), static_cast<double>(negatives) / queries.size());
}

TEST(Percent, OneDecimal) {
    EXPECT_EQ(percent(0.5), "50.0");
    EXPECT_EQ(percent(51.0 / 98.0), "52.0");
    EXPECT_EQ(percent(1.0), "100.0");
    EXPECT_EQ(percent(0.0), "0.0");
    EXPECT_EQ(percent(2.0 / 3.0), "66.7");
}

TEST(RunFile, RoundTripAndErrors) {
    const std::vector<RunEntry> run{{"Q1", "Article 5", "high", ScoreSource::Embedding, 0.9123456789012345},
                                    {"Q1", "Article 96", "fallback", ScoreSource::Lexical, 31.25}};
    std::ostringstream out;
    write_run(run, out);
    std::istringstream in(out.str());
    EXPECT_EQ(read_run(in), run);
    std::istringstream short_row("qid\tarticle_id\ttier\tsource\tscore\nQ1\tA\thigh\temb\n");
    EXPECT_EQ(code_of([&] { read_run(short_row); }), ErrorCode::ParseError);
    std::istringstream bad_score("Q1\tA\thigh\temb\tabc\n");
    EXPECT_EQ(code_of([&] { read_run(bad_score); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { load_run("/nonexistent/run.tsv"); }), ErrorCode::Io);
}

TEST(RankingFile, RoundTripAndRankOrder) {
    const Rankings r{{"Q1", {"a", "b"}}, {"Q2", {"c"}}};
    std::ostringstream out;
    write_rankings(r, out);
    std::istringstream in(out.str());
    EXPECT_EQ(read_rankings(in), r);
    std::istringstream gap("qid\trank\tarticle_id\nQ1\t1\ta\nQ1\t3\tb\n");
    EXPECT_EQ(code_of([&] { read_rankings(gap); }), ErrorCode::ParseError);
}

TEST(Report, MarkdownHasAllSections) {
    EvaluationReport report;
    report.retrieval = evaluate_retrieval({entry("Q1", "a", "high")}, three_queries(), Rankings{{"Q1", {"a"}}});
    report.tiers = tier_coverage_report({entry("Q1", "a", "high")}, three_queries(), {"high", "low"});
    report.accuracy = 0.75;
    report.decisions = 4;
    std::ostringstream md;
    write_report_markdown(report, md);
    const auto s = md.str();
    for (const char* needle : {"| Metric | high | low | fallback |", "| P_emb | 100.0 | 0.0 | 0.0 |", "| MAP | 25.0 |",
                               "| A | 75.0 |", "(1 without gold excluded)"})
        EXPECT_NE(s.find(needle), std::string::npos) << needle;
}
