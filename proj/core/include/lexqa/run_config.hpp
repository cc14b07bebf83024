#pragma once

#include "lexqa/embedding.hpp"
#include "lexqa/entailment.hpp"
#include "lexqa/fusion.hpp"
#include "lexqa/lexical_index.hpp"
#include "lexqa/text_analysis.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace lexqa {

nlohmann::ordered_json analyzer_to_json(const AnalyzerConfig& config);
AnalyzerConfig analyzer_from_json(const nlohmann::json& j, const AnalyzerConfig& base = {});

/// {"high": {"dominance", "floor_offset", "emb_min", "max_additional"}, ...}. Missing tiers
/// and fields keep the values from `base`; unknown tier names are rejected.
nlohmann::ordered_json tiers_to_json(const std::vector<TierConfig>& tiers);
std::vector<TierConfig> tiers_from_json(const nlohmann::json& j, const std::vector<TierConfig>& base = default_tiers());

/// Settings shared by the command-line tools, loadable from one JSON file:
/// {"analyzer", "bm25", "tiers", "gate", "embedding", "seed", "k"}.
struct RunConfig {
    AnalyzerConfig analyzer;
    Bm25Params bm25;
    std::vector<TierConfig> tiers = default_tiers();
    GateConfig gate;
    CbowConfig embedding;
    std::uint64_t seed = 1;
    std::size_t k = 30;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json run_config_to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace lexqa
