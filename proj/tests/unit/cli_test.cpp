#include "fixtures.hpp"

#include "lexqa/commands.hpp"
#include "lexqa/corpus.hpp"
#include "lexqa/embedding.hpp"
#include "lexqa/entailment.hpp"
#include "lexqa/evaluation.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using lexqa::cli::run_cli;

namespace {

struct Outcome {
    int code;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    testing::internal::CaptureStderr();
    args.insert(args.begin(), {"--log-level", "warn"});
    const int code = run_cli(args);
    return {code, testing::internal::GetCapturedStderr()};
}

std::string data(const char* name) { return fixtures::data_path(name).string(); }

std::vector<std::string> lines_of(const fs::path& path) {
    std::istringstream in(fixtures::read_file(path));
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

class Cli : public testing::Test {
  protected:
    static void SetUpTestSuite() {
        work_ = new fs::path(fixtures::temp_dir("cli"));
        ASSERT_EQ(run({"index", "--corpus", data("civil_code.txt"), "--out", (*work_ / "index").string()}).code, 0);
        ASSERT_EQ(run({"train-embeddings", "--corpus", data("civil_code.txt"), "--aux-corpus", data("aux_code.txt"),
                       "--dim", "16", "--epochs", "10", "--out", vectors().string()})
                      .code,
                  0);
    }
    static void TearDownTestSuite() {
        fs::remove_all(*work_);
        delete work_;
        work_ = nullptr;
    }

    static const fs::path& work() { return *work_; }
    static fs::path vectors() { return *work_ / "vectors.txt"; }

    static Outcome retrieve(const fs::path& out, const std::string& tiers = "default") {
        return run({"retrieve", "--corpus", data("civil_code.txt"), "--index", (work() / "index").string(),
                    "--vectors", vectors().string(), "--queries", data("queries.jsonl"), "--tiers", tiers, "--out",
                    out.string()});
    }

  private:
    static inline fs::path* work_ = nullptr;
};

}  // namespace

TEST_F(Cli, MissingInputNamesFlagAndPath) {
    const auto r = run({"index", "--corpus", "/nonexistent/statute.txt", "--out", (work() / "x").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--corpus"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("/nonexistent/statute.txt"), std::string::npos) << r.err;

    const auto v = run({"retrieve", "--corpus", data("civil_code.txt"), "--vectors", "/nonexistent/v.txt",
                        "--queries", data("queries.jsonl"), "--out", (work() / "x").string()});
    EXPECT_EQ(v.code, 2);
    EXPECT_NE(v.err.find("/nonexistent/v.txt"), std::string::npos) << v.err;
}

TEST_F(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"index", "--corpus", data("civil_code.txt")}).code, 2);
    EXPECT_EQ(run({"index", "--bogus"}).code, 2);
    EXPECT_EQ(retrieve(work() / "bad_tiers", "lenient").code, 2);
    EXPECT_EQ(run({"train-embeddings", "--stages", data("aux_code.txt") + ":zero", "--out",
                   (work() / "v.txt").string()})
                  .code,
              2);
}

TEST_F(Cli, MalformedVectorsExitTwo) {
    const auto bad = work() / "bad_vectors.txt";
    std::ofstream(bad) << "3 4\nfoo 1 2 3 4\n";
    const auto r = run({"retrieve", "--corpus", data("civil_code.txt"), "--vectors", bad.string(), "--queries",
                        data("queries.jsonl"), "--out", (work() / "bad").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("HeaderMismatch"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingVoteExitsThree) {
    const auto votes = work() / "partial_votes.jsonl";
    {
        std::ofstream out(votes);
        for (const auto& line : lines_of(fixtures::data_path("votes.jsonl")))
            if (line.find("\"Q02\"") == std::string::npos) out << line << '\n';
    }
    const auto r = run({"entail", "--corpus", data("civil_code.txt"), "--queries", data("queries.jsonl"), "--votes",
                        votes.string(), "--out", (work() / "ent_missing").string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("Q02"), std::string::npos) << r.err;
}

TEST_F(Cli, EntailWritesOneDecisionPerQuery) {
    const auto out = work() / "ent";
    ASSERT_EQ(run({"entail", "--corpus", data("civil_code.txt"), "--queries", data("queries.jsonl"), "--votes",
                   data("votes.jsonl"), "--out", out.string()})
                  .code,
              0);
    const auto d = lexqa::load_decisions(out / "decisions.tsv");
    EXPECT_EQ(d.size(), 20u);
    EXPECT_EQ(d.at("Q04").rule, lexqa::DecisionRule::Exact);

    ASSERT_EQ(run({"entail", "--queries", data("queries.jsonl"), "--baseline", "--out", (work() / "base").string()})
                  .code,
              0);
    for (const auto& [qid, v] : lexqa::load_decisions(work() / "base" / "decisions.tsv"))
        EXPECT_EQ(v, (lexqa::Verdict{lexqa::Decision::No, lexqa::DecisionRule::Baseline})) << qid;
}

TEST_F(Cli, RunCoversEveryQueryInOrder) {
    const auto out = work() / "ret_all";
    ASSERT_EQ(retrieve(out).code, 0);
    const auto run_entries = lexqa::load_run(out / "run.tsv");
    std::set<std::string> qids;
    std::string prev;
    for (const auto& e : run_entries) {
        EXPECT_LE(prev, e.qid);
        prev = e.qid;
        qids.insert(e.qid);
    }
    EXPECT_EQ(qids.size(), fixtures::queries().size());
    const auto rankings = lexqa::load_rankings(out / "ranking.tsv");
    EXPECT_EQ(rankings.size(), qids.size());
    for (const auto& [qid, ids] : rankings) {
        EXPECT_LE(ids.size(), 30u);
        EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ids.size()) << qid;
    }
    EXPECT_TRUE(fs::exists(out / "centroids" / "centroids.f32"));
}

TEST_F(Cli, HighOnlyAcceptancesAreASubsetOfDefault) {
    ASSERT_EQ(retrieve(work() / "ret_default").code, 0);
    ASSERT_EQ(retrieve(work() / "ret_high", "high-only").code, 0);
    const auto all = lines_of(work() / "ret_default" / "run.tsv");
    const std::set<std::string> all_set(all.begin(), all.end());
    for (const auto& line : lines_of(work() / "ret_high" / "run.tsv")) {
        if (line.find("\tfallback\t") != std::string::npos) continue;
        EXPECT_TRUE(all_set.contains(line)) << line;
    }
}

TEST_F(Cli, RetrieveIsByteDeterministic) {
    ASSERT_EQ(retrieve(work() / "det_a").code, 0);
    ASSERT_EQ(retrieve(work() / "det_b").code, 0);
    for (const char* f : {"run.tsv", "ranking.tsv"})
        EXPECT_EQ(fixtures::read_file(work() / "det_a" / f), fixtures::read_file(work() / "det_b" / f)) << f;
}

TEST_F(Cli, IndexIsByteDeterministic) {
    ASSERT_EQ(run({"index", "--corpus", data("civil_code.txt"), "--out", (work() / "index2").string()}).code, 0);
    for (const char* f : {"manifest.json", "postings.bin"})
        EXPECT_EQ(fixtures::read_file(work() / "index" / f), fixtures::read_file(work() / "index2" / f)) << f;
}

TEST_F(Cli, TwoStageTrainingIsLoadableAndDeterministic) {
    const auto first = lines_of(vectors());
    ASSERT_FALSE(first.empty());
    const auto model = lexqa::load_vectors(vectors());
    EXPECT_EQ(first[0], std::to_string(model.vocab_size()) + " 16");
    // the target corpus vocabulary is covered after the second stage
    for (const auto& w : fixtures::vocabulary(fixtures::civil_code())) EXPECT_TRUE(model.find(w)) << w;

    const auto again = work() / "vectors_again.txt";
    ASSERT_EQ(run({"train-embeddings", "--corpus", data("civil_code.txt"), "--aux-corpus", data("aux_code.txt"),
                   "--dim", "16", "--epochs", "10", "--out", again.string()})
                  .code,
              0);
    EXPECT_EQ(fixtures::read_file(again), fixtures::read_file(vectors()));

    const auto staged = work() / "vectors_staged.txt";
    ASSERT_EQ(run({"train-embeddings", "--stages", data("aux_code.txt") + ":3," + data("civil_code.txt") + ":2",
                   "--dim", "8", "--out", staged.string()})
                  .code,
              0);
    EXPECT_EQ(lexqa::load_vectors(staged).dim(), 8u);
}

TEST_F(Cli, PerfectRunScoresHundred) {
    const auto dir = work() / "perfect";
    fs::create_directories(dir);
    std::vector<lexqa::RunEntry> entries;
    std::map<std::string, lexqa::Verdict> decisions;
    for (const auto& q : fixtures::queries()) {
        for (const auto& id : q.gold_article_ids) entries.push_back({q.qid, id, "high", lexqa::ScoreSource::Embedding, 1});
        decisions[q.qid] = {*q.gold_entailment ? lexqa::Decision::Yes : lexqa::Decision::No,
                            lexqa::DecisionRule::Threshold};
    }
    {
        std::ofstream out(dir / "run.tsv");
        lexqa::write_run(entries, out);
        std::ofstream dec(dir / "decisions.tsv");
        lexqa::write_decisions(decisions, dec);
    }
    ASSERT_EQ(run({"evaluate", "--run", (dir / "run.tsv").string(), "--decisions", (dir / "decisions.tsv").string(),
                   "--gold", data("queries.jsonl"), "--out", (dir / "report").string()})
                  .code,
              0);
    const auto tsv = fixtures::read_file(dir / "report" / "report.tsv");
    for (const char* line : {"retrieval\tall\tF2\t100.0", "retrieval\tall\tP\t100.0", "retrieval\tall\tR\t100.0",
                             "entailment\tall\tA\t100.0", "tier\thigh/emb\tP\t100.0"})
        EXPECT_NE(tsv.find(line), std::string::npos) << line;
    EXPECT_TRUE(fs::exists(dir / "report" / "report.md"));
}

TEST_F(Cli, EvaluateRejectsUnknownQueryIds) {
    const auto dir = work() / "unknown_qid";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "run.tsv");
        lexqa::write_run({{"Q99", "Article 1", "high", lexqa::ScoreSource::Lexical, 1}}, out);
    }
    const auto r = run({"evaluate", "--run", (dir / "run.tsv").string(), "--gold", data("queries.jsonl"), "--out",
                        (dir / "report").string()});
    EXPECT_EQ(r.code, 3);
}

TEST_F(Cli, SplitWritesLoadableJsonl) {
    const auto out = work() / "split" / "corpus.jsonl";
    ASSERT_EQ(run({"split", "--input", data("civil_code.txt"), "--out", out.string()}).code, 0);
    EXPECT_EQ(lexqa::load_corpus(out), fixtures::civil_code());
}

TEST_F(Cli, UndefinedEmbeddingIsNotEvidence) {
    const auto queries = work() / "oov_queries.jsonl";
    std::ofstream(queries) << R"({"qid":"X1","text":"zzqx qqzz","gold":["Article 1"],"label":true})" << '\n'
                           << R"({"qid":"X2","text":"zzqx rescinded","gold":["Article 96"],"label":true})" << '\n';
    const auto out = work() / "ret_oov";
    const auto r = run({"retrieve", "--corpus", data("civil_code.txt"), "--index", (work() / "index").string(),
                        "--vectors", vectors().string(), "--queries", queries.string(), "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    // X1 matches nothing lexically and has no centroid: skipped with a warning
    EXPECT_NE(r.err.find("X1"), std::string::npos) << r.err;
    const auto entries = lexqa::load_run(out / "run.tsv");
    for (const auto& e : entries) EXPECT_NE(e.qid, "X1");
}
