#pragma once

#include "lexqa/scored_hit.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace lexqa {

/// Acceptance criteria for one confidence tier.
struct TierConfig {
    std::string name;
    double dominance = 1.0;     // bm25 top-1 must be >= dominance * runner-up
    double floor_offset = 0.0;  // bm25 top-1 must exceed query_len + floor_offset
    double emb_min = 1.0;       // embedding top-1 similarity must be >= emb_min
    std::size_t max_additional = 0;

    bool operator==(const TierConfig&) const = default;
};

/// high = (2.0, +20, 0.90, 2), medium = (1.5, +10, 0.80, 2), low = (1.2, 0, 0.70, 1).
std::vector<TierConfig> default_tiers();

/// Checks dominance >= 1, emb_min in [0, 1] and that the three thresholds never
/// increase from one tier to the next. Throws InvalidArgument.
void validate_tiers(const std::vector<TierConfig>& tiers);

inline constexpr std::string_view kFallbackTier = "fallback";

struct Acceptance {
    std::size_t ordinal = 0;
    std::string article_id;
    std::string tier;
    ScoreSource source = ScoreSource::Lexical;
    double score = 0.0;

    bool operator==(const Acceptance&) const = default;
};

struct FusionResult {
    std::vector<Acceptance> accepted;
    bool used_fallback = false;
};

/// Applies one tier to the top of each ranked list. Embedding acceptance comes first;
/// an article accepted by both branches appears once, as an embedding acceptance.
std::vector<Acceptance> evaluate_tier(const std::vector<ScoredHit>& bm25_hits,
                                      const std::vector<ScoredHit>& emb_hits, std::size_t query_len,
                                      const TierConfig& tier);

/// Walks the tiers from high to low. Each tier sees both lists with the articles accepted so
/// far removed and may add at most `max_additional` new articles. With no acceptance at any
/// tier the embedding top-1 (else the BM25 top-1) is returned with used_fallback set.
/// Throws NoCandidates when both lists are empty.
FusionResult fuse(const std::vector<ScoredHit>& bm25_hits, const std::vector<ScoredHit>& emb_hits,
                  std::size_t query_len, const std::vector<TierConfig>& tiers);

}  // namespace lexqa
