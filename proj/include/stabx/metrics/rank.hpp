#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "stabx/core/types.hpp"

namespace stabx::metrics {

enum class RankMetric { jaccard, ao, kendall };

std::string_view to_string(RankMetric metric);
RankMetric parse_rank_metric(std::string_view text);

// All three take two rankings over the same P features. k is clamped to P
// with a warning; k = 0 or a size mismatch is an error.

// |A_k intersect B_k| / |A_k union B_k|.
double jaccard_at_k(const FeatureRanking& a, const FeatureRanking& b, std::size_t k);

// (1/k) sum_{d=1..k} |A_d intersect B_d| / d.
double average_overlap(const FeatureRanking& a, const FeatureRanking& b, std::size_t k);

// Top-k Kendall distance with penalty p over pairs of A_k union B_k,
// normalized to 1 - 2 K / C(|U|, 2). Fewer than two items in the union give 1.
double kendall_topk(const FeatureRanking& a, const FeatureRanking& b, std::size_t k,
                    double p = 0.0);

// Same metrics on explicit top-k lists of distinct item ids below `universe`.
double jaccard_lists(std::span<const std::size_t> a, std::span<const std::size_t> b,
                     std::size_t universe);
double average_overlap_lists(std::span<const std::size_t> a, std::span<const std::size_t> b,
                             std::size_t universe);
double kendall_lists(std::span<const std::size_t> a, std::span<const std::size_t> b,
                     std::size_t universe, double p);

double rank_similarity(RankMetric metric, const FeatureRanking& a, const FeatureRanking& b,
                       std::size_t k, double kendall_p = 0.0);

}  // namespace stabx::metrics
