#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "stabx/core/errors.hpp"
#include "stabx/core/random.hpp"
#include "stabx/metrics/rank.hpp"
#include "support/oracles.hpp"

using namespace stabx;
using namespace stabx::metrics;

namespace {

namespace oracle = stabx::testing::oracle;

std::vector<std::size_t> top(const FeatureRanking& r, std::size_t k) {
  return {r.order().begin(), r.order().begin() + static_cast<std::ptrdiff_t>(k)};
}

FeatureRanking ranking_from_order(const std::vector<std::size_t>& order) {
  std::vector<double> scores(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) scores[order[i]] = static_cast<double>(order.size() - i);
  return FeatureRanking::from_scores(scores);
}

FeatureRanking random_ranking(Rng& rng, std::size_t p) {
  std::vector<double> scores(p);
  // Coarse scores so ties, and the tie-break, are exercised.
  for (auto& s : scores) s = static_cast<double>(rng.index(p));
  return FeatureRanking::from_scores(scores);
}

}  // namespace

TEST(RankMetrics, JaccardExamples) {
  const auto a = ranking_from_order({1, 2, 3, 0, 4, 5});
  const auto b = ranking_from_order({1, 2, 4, 0, 3, 5});
  EXPECT_DOUBLE_EQ(jaccard_at_k(a, b, 3), 0.5);
  EXPECT_DOUBLE_EQ(jaccard_at_k(a, a, 3), 1.0);
  const auto c = ranking_from_order({0, 1, 2, 3, 4, 5});
  const auto d = ranking_from_order({3, 4, 5, 0, 1, 2});
  EXPECT_DOUBLE_EQ(jaccard_at_k(c, d, 3), 0.0);
}

TEST(RankMetrics, AverageOverlapExamples) {
  const auto a = ranking_from_order({0, 1, 2, 3});
  const auto b = ranking_from_order({1, 0, 2, 3});
  EXPECT_DOUBLE_EQ(average_overlap(a, b, 3), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(average_overlap(a, a, 3), 1.0);
  const auto c = ranking_from_order({0, 1, 2, 3, 4, 5});
  const auto d = ranking_from_order({3, 4, 5, 0, 1, 2});
  EXPECT_DOUBLE_EQ(average_overlap(c, d, 3), 0.0);
}

TEST(RankMetrics, KendallExamples) {
  const std::vector<std::size_t> a{1, 2}, b{2, 1}, c{3, 4};
  EXPECT_DOUBLE_EQ(kendall_lists(a, a, 5, 0.0), 1.0);
  EXPECT_EQ(kendall_lists(a, b, 5, 0.0), -1.0);
  EXPECT_EQ(kendall_lists(a, c, 5, 0.0), -1.0 / 3.0);
  // The two unknowable pairs add p each: 1 - 2 (4 + 2p) / 6.
  EXPECT_DOUBLE_EQ(kendall_lists(a, c, 5, 0.5), 1.0 - 2.0 * 5.0 / 6.0);
}

TEST(RankMetrics, ListFormsAgreeWithRankingForms) {
  const auto a = ranking_from_order({1, 2, 3, 0, 4, 5});
  const auto b = ranking_from_order({1, 2, 4, 0, 3, 5});
  EXPECT_DOUBLE_EQ(jaccard_lists(top(a, 3), top(b, 3), 6), jaccard_at_k(a, b, 3));
  EXPECT_DOUBLE_EQ(average_overlap_lists(top(a, 3), top(b, 3), 6), average_overlap(a, b, 3));
  EXPECT_DOUBLE_EQ(kendall_lists(top(a, 3), top(b, 3), 6, 0.3), kendall_topk(a, b, 3, 0.3));
}

TEST(RankMetrics, Errors) {
  const auto a = ranking_from_order({0, 1, 2});
  const auto b = ranking_from_order({0, 1, 2, 3});
  EXPECT_THROW(jaccard_at_k(a, a, 0), ValidationError);
  EXPECT_THROW(average_overlap(a, b, 2), ValidationError);
  // k above P is clamped.
  EXPECT_DOUBLE_EQ(jaccard_at_k(a, a, 10), 1.0);
  EXPECT_EQ(parse_rank_metric("kendall"), RankMetric::kendall);
  EXPECT_THROW(parse_rank_metric("rbo"), ValidationError);
}

TEST(RankMetrics, RandomPairsMatchOraclesAndAreSymmetric) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t p = 2 + rng.index(30);
    const std::size_t k = 1 + rng.index(p);
    const double penalty = static_cast<double>(rng.index(3)) / 2.0;
    const auto a = random_ranking(rng, p);
    const auto b = random_ranking(rng, p);
    const auto ta = top(a, k), tb = top(b, k);

    EXPECT_NEAR(jaccard_at_k(a, b, k), oracle::jaccard(ta, tb), 1e-12);
    EXPECT_NEAR(average_overlap(a, b, k), oracle::average_overlap(ta, tb), 1e-12);
    EXPECT_NEAR(kendall_topk(a, b, k, penalty), oracle::kendall(ta, tb, penalty), 1e-12);

    for (auto metric : {RankMetric::jaccard, RankMetric::ao, RankMetric::kendall}) {
      const double ab = rank_similarity(metric, a, b, k, penalty);
      EXPECT_DOUBLE_EQ(ab, rank_similarity(metric, b, a, k, penalty));
      EXPECT_DOUBLE_EQ(rank_similarity(metric, a, a, k, penalty), 1.0);
      EXPECT_GE(ab, metric == RankMetric::kendall ? -1.0 : 0.0);
      EXPECT_LE(ab, 1.0);
    }
  }
}
