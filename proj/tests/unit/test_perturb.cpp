#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "stabx/core/errors.hpp"
#include "stabx/perturb/plan.hpp"
#include "support/testdata.hpp"

using namespace stabx;
using namespace stabx::perturb;

namespace {

std::size_t intersection_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

}  // namespace

TEST(Splits, SizesAndPartition) {
  const auto plan = make_splits(10, 0.7, 20, 1);
  ASSERT_EQ(plan.repeats(), 20u);
  for (const auto& d : plan.draws) {
    EXPECT_EQ(d.retained.size(), 7u);
    EXPECT_EQ(d.held_out.size(), 3u);
    std::vector<std::size_t> all = d.retained;
    all.insert(all.end(), d.held_out.begin(), d.held_out.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(all[i], i);
  }
}

TEST(Splits, DeterministicAndSeedSensitive) {
  EXPECT_EQ(make_splits(50, 0.7, 5, 3), make_splits(50, 0.7, 5, 3));
  EXPECT_NE(make_splits(50, 0.7, 5, 3).draws, make_splits(50, 0.7, 5, 4).draws);
  // A repeat does not depend on how many repeats the plan holds.
  EXPECT_EQ(make_splits(50, 0.7, 5, 3).draws[2], make_splits(50, 0.7, 9, 3).draws[2]);
}

TEST(Splits, DegenerateTrainSize) {
  EXPECT_THROW(make_splits(3, 0.01, 5, 0), ValidationError);
  EXPECT_THROW(make_splits(10, 1.0, 5, 0), ValidationError);
  EXPECT_THROW(make_splits(10, 0.7, 1, 0), ValidationError);
}

TEST(Subsamples, SizesNoDuplicatesAndOverlapBounds) {
  const auto plan = make_subsamples(100, 0.7, 10, 2);
  for (const auto& d : plan.draws) {
    EXPECT_EQ(d.retained.size(), 70u);
    EXPECT_EQ(std::set<std::size_t>(d.retained.begin(), d.retained.end()).size(), 70u);
    EXPECT_TRUE(d.held_out.empty());
  }
  const auto small = make_subsamples(10, 0.7, 30, 5);
  for (std::size_t a = 0; a < small.repeats(); ++a) {
    for (std::size_t b = a + 1; b < small.repeats(); ++b) {
      const auto n = intersection_size(small.draws[a].retained, small.draws[b].retained);
      EXPECT_GE(n, 4u);
      EXPECT_LE(n, 7u);
    }
  }
}

TEST(Subsamples, FullFractionKeepsEverything) {
  const auto plan = make_subsamples(8, 1.0, 3, 0);
  for (const auto& d : plan.draws) EXPECT_EQ(d.retained.size(), 8u);
  EXPECT_THROW(make_subsamples(8, 0.0, 3, 0), ValidationError);
}

TEST(Noise, ZeroSigmaIsIdentity) {
  const auto d = stabx::testing::unsupervised(stabx::testing::normal_matrix(30, 4, 1));
  const auto same = apply_noise(d, NoiseDistribution::normal, 0.0, 77);
  EXPECT_TRUE(same.features() == d.features());
}

TEST(Noise, NormalScaleMatches) {
  const std::size_t n = 4000;
  const auto d = stabx::testing::unsupervised(stabx::testing::normal_matrix(n, 3, 2));
  const auto noisy = apply_noise(d, NoiseDistribution::normal, 0.15, 9);
  const Eigen::MatrixXd diff = noisy.features() - d.features();
  for (Eigen::Index j = 0; j < diff.cols(); ++j) {
    const auto c = diff.col(j);
    const double sd = std::sqrt((c.array() - c.mean()).square().sum() / static_cast<double>(n - 1));
    EXPECT_NEAR(sd, 0.15, 3 * 0.15 / std::sqrt(static_cast<double>(n)));
  }
}

TEST(Noise, LaplaceScaleMatches) {
  const std::size_t n = 20000;
  const auto d = stabx::testing::unsupervised(Eigen::MatrixXd::Zero(n, 1));
  const auto noisy = apply_noise(d, NoiseDistribution::laplace, 0.5, 4);
  // Mean absolute deviation of Laplace(0, b) is b.
  EXPECT_NEAR(noisy.features().cwiseAbs().mean(), 0.5, 0.02);
}

TEST(Noise, SeedDeterminism) {
  const auto d = stabx::testing::unsupervised(stabx::testing::normal_matrix(10, 2, 1));
  const auto a = apply_noise(d, NoiseDistribution::normal, 1.0, 1);
  const auto b = apply_noise(d, NoiseDistribution::normal, 1.0, 1);
  const auto c = apply_noise(d, NoiseDistribution::normal, 1.0, 2);
  EXPECT_TRUE(a.features() == b.features());
  EXPECT_FALSE(a.features() == c.features());
  EXPECT_THROW(apply_noise(d, NoiseDistribution::normal, -1.0, 1), ValidationError);
}

TEST(Noise, PlanCarriesDistinctSeeds) {
  const auto plan = make_noise_plan(12, NoiseDistribution::laplace, 0.3, 4, 8);
  EXPECT_EQ(plan.kind, PlanKind::noise);
  std::set<std::uint64_t> seeds;
  for (const auto& d : plan.draws) {
    seeds.insert(d.seed);
    EXPECT_EQ(d.retained.size(), 12u);
  }
  EXPECT_EQ(seeds.size(), 4u);
}

TEST(SigmaSweep, Grid) {
  EXPECT_EQ(sigma_sweep(0, 5, 6), (std::vector<double>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(sigma_sweep(0.15, 0.15, 1), (std::vector<double>{0.15}));
  EXPECT_THROW(sigma_sweep(1, 0, 3), ValidationError);
}

TEST(PlanJson, RoundTripAndHash) {
  for (const auto& plan : {make_splits(20, 0.7, 3, 1), make_subsamples(20, 0.5, 3, 1),
                           make_noise_plan(20, NoiseDistribution::normal, 0.25, 3, 1)}) {
    const auto back = PerturbationPlan::from_json(nlohmann::json::parse(plan.to_json().dump()));
    EXPECT_EQ(back, plan);
    EXPECT_EQ(back.hash(), plan.hash());
  }
  EXPECT_NE(make_splits(20, 0.7, 3, 1).hash(), make_splits(20, 0.7, 3, 2).hash());
  auto doc = make_splits(20, 0.7, 3, 1).to_json();
  doc["version"] = 99;
  EXPECT_THROW(PerturbationPlan::from_json(doc), ValidationError);
}
