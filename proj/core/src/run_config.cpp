#include "lexqa/run_config.hpp"

#include "lexqa/binary_io.hpp"
#include "lexqa/error.hpp"

namespace lexqa {

namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> known, std::string_view where) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, std::string(where) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw Error(ErrorCode::ParseError, "unknown key '" + key + "' in " + std::string(where));
    }
}

}  // namespace

nlohmann::ordered_json analyzer_to_json(const AnalyzerConfig& config) {
    return {{"lowercase", config.lowercase},
            {"split_hyphens", config.split_hyphens},
            {"stemmer", std::string(to_string(config.stemmer))}};
}

AnalyzerConfig analyzer_from_json(const nlohmann::json& j, const AnalyzerConfig& base) {
    reject_unknown(j, {"lowercase", "split_hyphens", "stemmer"}, "analyzer");
    AnalyzerConfig c = base;
    read_if(j, "lowercase", c.lowercase);
    read_if(j, "split_hyphens", c.split_hyphens);
    if (j.contains("stemmer")) c.stemmer = stemmer_from_string(j.at("stemmer").get<std::string>());
    return c;
}

nlohmann::ordered_json tiers_to_json(const std::vector<TierConfig>& tiers) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& t : tiers)
        j[t.name] = {{"dominance", t.dominance},
                     {"floor_offset", t.floor_offset},
                     {"emb_min", t.emb_min},
                     {"max_additional", t.max_additional}};
    return j;
}

std::vector<TierConfig> tiers_from_json(const nlohmann::json& j, const std::vector<TierConfig>& base) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "tiers must be a JSON object");
    auto tiers = base;
    for (const auto& [name, value] : j.items()) {
        auto it = std::find_if(tiers.begin(), tiers.end(), [&](const TierConfig& t) { return t.name == name; });
        if (it == tiers.end()) throw Error(ErrorCode::InvalidArgument, "unknown tier '" + name + "'");
        reject_unknown(value, {"dominance", "floor_offset", "emb_min", "max_additional"}, "tier " + name);
        read_if(value, "dominance", it->dominance);
        read_if(value, "floor_offset", it->floor_offset);
        read_if(value, "emb_min", it->emb_min);
        read_if(value, "max_additional", it->max_additional);
    }
    validate_tiers(tiers);
    return tiers;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    reject_unknown(j, {"analyzer", "bm25", "tiers", "gate", "embedding", "seed", "k"}, "run config");
    RunConfig c;
    try {
        if (j.contains("analyzer")) c.analyzer = analyzer_from_json(j.at("analyzer"));
        if (j.contains("bm25")) {
            const auto& b = j.at("bm25");
            reject_unknown(b, {"k1", "b"}, "bm25");
            read_if(b, "k1", c.bm25.k1);
            read_if(b, "b", c.bm25.b);
        }
        if (j.contains("tiers")) c.tiers = tiers_from_json(j.at("tiers"));
        if (j.contains("gate")) {
            const auto& g = j.at("gate");
            reject_unknown(g, {"approve_threshold"}, "gate");
            read_if(g, "approve_threshold", c.gate.approve_threshold);
        }
        if (j.contains("embedding")) {
            const auto& e = j.at("embedding");
            reject_unknown(e, {"dim", "window", "epochs", "learning_rate", "negative", "min_count"}, "embedding");
            read_if(e, "dim", c.embedding.dim);
            read_if(e, "window", c.embedding.window);
            read_if(e, "epochs", c.embedding.epochs);
            read_if(e, "learning_rate", c.embedding.learning_rate);
            read_if(e, "negative", c.embedding.negative);
            read_if(e, "min_count", c.embedding.min_count);
        }
        read_if(j, "seed", c.seed);
        read_if(j, "k", c.k);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("run config: ") + e.what());
    }
    c.gate.normalization = c.analyzer;
    c.embedding.seed = c.seed;
    validate_gate(c.gate);
    if (c.bm25.k1 < 0.0 || c.bm25.b < 0.0 || c.bm25.b > 1.0)
        throw Error(ErrorCode::InvalidArgument, "bm25 requires k1 >= 0 and b in [0, 1]");
    if (c.k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    return c;
}

nlohmann::ordered_json run_config_to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["analyzer"] = analyzer_to_json(c.analyzer);
    j["bm25"] = {{"k1", c.bm25.k1}, {"b", c.bm25.b}};
    j["tiers"] = tiers_to_json(c.tiers);
    j["gate"] = {{"approve_threshold", c.gate.approve_threshold}};
    j["embedding"] = {{"dim", c.embedding.dim},           {"window", c.embedding.window},
                      {"epochs", c.embedding.epochs},     {"learning_rate", c.embedding.learning_rate},
                      {"negative", c.embedding.negative}, {"min_count", c.embedding.min_count}};
    j["seed"] = c.seed;
    j["k"] = c.k;
    return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

}  // namespace lexqa
