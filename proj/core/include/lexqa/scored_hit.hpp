#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace lexqa {

enum class ScoreSource { Lexical, Embedding };

std::string_view to_string(ScoreSource source) noexcept;
ScoreSource score_source_from_string(std::string_view name);

struct ScoredHit {
    std::size_t ordinal = 0;
    std::string article_id;
    double score = 0.0;
    ScoreSource source = ScoreSource::Lexical;

    bool operator==(const ScoredHit&) const = default;
};

/// Ranking order used by every searcher: score descending, ordinal ascending.
inline bool ranks_before(const ScoredHit& a, const ScoredHit& b) noexcept {
    if (a.score != b.score) return a.score > b.score;
    return a.ordinal < b.ordinal;
}

}  // namespace lexqa
