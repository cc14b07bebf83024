#include "error_matchers.hpp"
#include "fixtures.hpp"

#include "lexqa/run_config.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace lexqa;
using nlohmann::json;

TEST(RunConfig, EmptyObjectGivesDefaults) {
    const auto c = run_config_from_json(json::object());
    EXPECT_EQ(c.tiers, default_tiers());
    EXPECT_EQ(c.bm25, Bm25Params{});
    EXPECT_EQ(c.gate.approve_threshold, 0.53);
    EXPECT_EQ(c.k, 30u);
    EXPECT_EQ(c.seed, 1u);
}

TEST(RunConfig, PartialOverridesMerge) {
    const auto c = run_config_from_json(json::parse(R"({
        "analyzer": {"stemmer": "snowball"},
        "tiers": {"medium": {"emb_min": 0.75}},
        "gate": {"approve_threshold": 0.6},
        "embedding": {"dim": 64},
        "seed": 9, "k": 12
    })"));
    EXPECT_EQ(c.analyzer.stemmer, StemmerKind::Snowball);
    EXPECT_TRUE(c.analyzer.lowercase);
    EXPECT_EQ(c.tiers[1].emb_min, 0.75);
    EXPECT_EQ(c.tiers[1].dominance, 1.5);
    EXPECT_EQ(c.tiers[0], default_tiers()[0]);
    EXPECT_EQ(c.gate.approve_threshold, 0.6);
    // the gate normalizes text the same way as the index
    EXPECT_EQ(c.gate.normalization, c.analyzer);
    EXPECT_EQ(c.embedding.dim, 64u);
    EXPECT_EQ(c.embedding.seed, 9u);
    EXPECT_EQ(c.k, 12u);
}

TEST(RunConfig, RoundTripThroughJson) {
    RunConfig c;
    c.analyzer.split_hyphens = true;
    c.bm25 = {1.1, 0.6};
    c.tiers[2].max_additional = 3;
    c.seed = 77;
    const auto back = run_config_from_json(json::parse(run_config_to_json(c).dump()));
    EXPECT_EQ(back.analyzer, c.analyzer);
    EXPECT_EQ(back.bm25, c.bm25);
    EXPECT_EQ(back.tiers, c.tiers);
    EXPECT_EQ(back.seed, 77u);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
    EXPECT_EQ(code_of([] { run_config_from_json(json::parse(R"({"sede": 1})")); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { run_config_from_json(json::parse(R"({"bm25": {"k": 1}})")); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { run_config_from_json(json::parse(R"({"tiers": {"extreme": {}}})")); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { run_config_from_json(json::parse(R"({"tiers": {"low": {"emb_min": 0.95}}})")); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { run_config_from_json(json::parse(R"({"gate": {"approve_threshold": 0.4}})")); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { run_config_from_json(json::parse(R"({"k": 0})")); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { run_config_from_json(json::parse(R"({"seed": "x"})")); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { run_config_from_json(json::parse("[]")); }), ErrorCode::ParseError);
}

TEST(RunConfig, LoadFromFile) {
    const auto path = fixtures::temp_dir("config") / "run.json";
    std::ofstream(path) << R"({"k": 5})";
    EXPECT_EQ(load_run_config(path).k, 5u);
    std::ofstream(path, std::ios::trunc) << "{not json";
    EXPECT_EQ(code_of([&] { load_run_config(path); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { load_run_config("/nonexistent/run.json"); }), ErrorCode::Io);
}
