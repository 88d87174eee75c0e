#include <chrono>
#include <cmath>

#include <gtest/gtest.h>

#include "stabx/core/errors.hpp"
#include "stabx/metrics/partition.hpp"
#include "support/oracles.hpp"

using namespace stabx;
using namespace stabx::metrics;

namespace {

using Labels = std::vector<int>;
namespace oracle = stabx::testing::oracle;

}  // namespace

TEST(Contingency, Examples) {
  const Labels a{0, 0, 1, 1};
  auto t = contingency(a, a);
  EXPECT_EQ(t.counts, (std::vector<std::vector<long long>>{{2, 0}, {0, 2}}));
  t = contingency(a, Labels{0, 1, 0, 1});
  EXPECT_EQ(t.counts, (std::vector<std::vector<long long>>{{1, 1}, {1, 1}}));
  t = contingency(Labels{0, 0, 0}, Labels{0, 1, 2});
  EXPECT_EQ(t.counts, (std::vector<std::vector<long long>>{{1, 1, 1}}));
  EXPECT_THROW(contingency(Labels{0, 1}, Labels{0}), ValidationError);
}

TEST(Contingency, RequiresMatchingSampleIds) {
  const ClusterLabeling a{{"a", "b"}, {0, 1}, 2}, b{{"b", "a"}, {0, 1}, 2};
  EXPECT_THROW(contingency(a, b), ValidationError);
}

TEST(PartitionMetrics, HandExamples) {
  const Labels a{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(partition_similarity(PartitionMetric::ari, a, Labels{1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(partition_similarity(PartitionMetric::ari, a, Labels{0, 1, 0, 1}), -0.5);
  EXPECT_DOUBLE_EQ(partition_similarity(PartitionMetric::fm, a, a), 1.0);
  EXPECT_DOUBLE_EQ(partition_similarity(PartitionMetric::fm, a, Labels{0, 1, 0, 1}), 0.0);
  EXPECT_NEAR(partition_similarity(PartitionMetric::fm, a, Labels{0, 0, 1, 2}), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(partition_similarity(PartitionMetric::mi, a, Labels{0, 1, 0, 1}), 0.0, 1e-15);
  EXPECT_NEAR(partition_similarity(PartitionMetric::mi, a, a), std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(partition_similarity(PartitionMetric::v_measure, a, a), 1.0);
  EXPECT_NEAR(partition_similarity(PartitionMetric::v_measure, a, Labels{0, 1, 0, 1}), 0.0, 1e-15);
}

TEST(PartitionMetrics, VMeasureEqualsArithmeticNmi) {
  const Labels a{0, 0, 1, 1, 2, 2, 0, 1}, b{0, 1, 1, 1, 2, 0, 0, 2};
  const auto t = contingency(a, b);
  const double nmi = 2.0 * mutual_information(t) / (entropy_rows(t) + entropy_cols(t));
  EXPECT_NEAR(v_measure(t), nmi, 1e-12);
}

TEST(PartitionMetrics, ExhaustiveOracleEquivalence) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t compared = 0;
  for (std::size_t n = 2; n <= 7; ++n) {
    const auto all = oracle::partitions(n, 3);
    for (const auto& a : all) {
      for (const auto& b : all) {
        const auto t = contingency(a, b);
        ASSERT_NEAR(ari(t), oracle::ari(a, b), 1e-12);
        ASSERT_NEAR(fowlkes_mallows(t), oracle::fm(a, b), 1e-12);
        const double mi = mutual_information(t);
        ASSERT_NEAR(mi, oracle::mi(a, b), 1e-12);
        ASSERT_NEAR(v_measure(t), oracle::v_measure(a, b), 1e-12);
        ASSERT_LE(mi, std::min(entropy_rows(t), entropy_cols(t)) + 1e-12);
        ++compared;
      }
    }
  }
  // 2, 5, 14, 41, 122 and 365 partitions for n = 2..7.
  EXPECT_EQ(compared, 150015u);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 60.0);
}

TEST(PartitionMetrics, Parsing) {
  EXPECT_EQ(parse_partition_metric("v_measure"), PartitionMetric::v_measure);
  EXPECT_EQ(to_string(PartitionMetric::fm), "fm");
  EXPECT_THROW(parse_partition_metric("nmi"), ValidationError);
}
