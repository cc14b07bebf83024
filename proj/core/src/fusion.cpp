#include "lexqa/fusion.hpp"

#include "lexqa/error.hpp"

#include <algorithm>
#include <set>

namespace lexqa {

std::string_view to_string(ScoreSource source) noexcept {
    return source == ScoreSource::Embedding ? "emb" : "bm25";
}

ScoreSource score_source_from_string(std::string_view name) {
    if (name == "bm25") return ScoreSource::Lexical;
    if (name == "emb") return ScoreSource::Embedding;
    throw Error(ErrorCode::InvalidArgument, "unknown score source '" + std::string(name) + "'");
}

std::vector<TierConfig> default_tiers() {
    return {
        {"high", 2.0, 20.0, 0.90, 2},
        {"medium", 1.5, 10.0, 0.80, 2},
        {"low", 1.2, 0.0, 0.70, 1},
    };
}

void validate_tiers(const std::vector<TierConfig>& tiers) {
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const auto& t = tiers[i];
        if (t.name.empty() || t.name == kFallbackTier)
            throw Error(ErrorCode::InvalidArgument, "tier names must be non-empty and not 'fallback'");
        if (!(t.dominance >= 1.0))
            throw Error(ErrorCode::InvalidArgument, "tier " + t.name + ": dominance must be >= 1");
        if (!(t.emb_min >= 0.0 && t.emb_min <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "tier " + t.name + ": emb_min must lie in [0, 1]");
        if (i == 0) continue;
        const auto& p = tiers[i - 1];
        if (t.dominance > p.dominance || t.floor_offset > p.floor_offset || t.emb_min > p.emb_min)
            throw Error(ErrorCode::InvalidArgument,
                        "tier " + t.name + " is stricter than the preceding tier " + p.name);
    }
}

std::vector<Acceptance> evaluate_tier(const std::vector<ScoredHit>& bm25_hits,
                                      const std::vector<ScoredHit>& emb_hits, std::size_t query_len,
                                      const TierConfig& tier) {
    std::vector<Acceptance> out;
    if (!emb_hits.empty() && emb_hits.front().score >= tier.emb_min) {
        const auto& h = emb_hits.front();
        out.push_back({h.ordinal, h.article_id, tier.name, ScoreSource::Embedding, h.score});
    }
    if (!bm25_hits.empty()) {
        const auto& top = bm25_hits.front();
        const double second = bm25_hits.size() > 1 ? bm25_hits[1].score : 0.0;
        const bool dominant = second > 0.0 ? top.score >= tier.dominance * second : top.score > 0.0;
        const bool above_floor = top.score > static_cast<double>(query_len) + tier.floor_offset;
        const bool duplicate = !out.empty() && out.front().ordinal == top.ordinal;
        if (dominant && above_floor && !duplicate)
            out.push_back({top.ordinal, top.article_id, tier.name, ScoreSource::Lexical, top.score});
    }
    return out;
}

FusionResult fuse(const std::vector<ScoredHit>& bm25_hits, const std::vector<ScoredHit>& emb_hits,
                  std::size_t query_len, const std::vector<TierConfig>& tiers) {
    if (bm25_hits.empty() && emb_hits.empty())
        throw Error(ErrorCode::NoCandidates, "no BM25 or embedding candidates");

    FusionResult result;
    std::set<std::size_t> taken;
    auto remaining = [&taken](const std::vector<ScoredHit>& hits) {
        std::vector<ScoredHit> rest;
        for (const auto& h : hits)
            if (!taken.contains(h.ordinal)) rest.push_back(h);
        return rest;
    };
    for (const auto& tier : tiers) {
        auto accepted = evaluate_tier(remaining(bm25_hits), remaining(emb_hits), query_len, tier);
        if (accepted.size() > tier.max_additional) accepted.resize(tier.max_additional);
        for (auto& a : accepted) {
            taken.insert(a.ordinal);
            result.accepted.push_back(std::move(a));
        }
    }
    if (result.accepted.empty()) {
        const auto& h = emb_hits.empty() ? bm25_hits.front() : emb_hits.front();
        result.accepted.push_back({h.ordinal, h.article_id, std::string(kFallbackTier), h.source, h.score});
        result.used_fallback = true;
    }
    return result;
}

}  // namespace lexqa
