#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stabx/core/dataset.hpp"

namespace stabx::perturb {

enum class PlanKind { split, subsample, noise };
enum class NoiseDistribution { normal, laplace };

std::string_view to_string(PlanKind kind);
std::string_view to_string(NoiseDistribution dist);
PlanKind parse_plan_kind(std::string_view text);
NoiseDistribution parse_distribution(std::string_view text);

// One repeat of a plan. For split plans `retained` is the training set and
// `held_out` the test set; for subsample plans only `retained` is used; for
// noise plans `retained` is every sample and `seed` drives the noise draw.
struct RepeatDraw {
  std::uint64_t seed = 0;
  std::vector<std::size_t> retained;
  std::vector<std::size_t> held_out;

  friend bool operator==(const RepeatDraw&, const RepeatDraw&) = default;
};

struct PerturbationPlan {
  PlanKind kind = PlanKind::split;
  std::size_t n_samples = 0;
  std::uint64_t base_seed = 0;
  // Train ratio for split plans, retained fraction for subsample plans.
  double fraction = 1.0;
  NoiseDistribution distribution = NoiseDistribution::normal;
  // Noise scale: standard deviation (normal) or scale b (Laplace).
  double sigma = 0.0;
  std::vector<RepeatDraw> draws;

  std::size_t repeats() const { return draws.size(); }

  nlohmann::json to_json() const;
  static PerturbationPlan from_json(const nlohmann::json& doc);
  // Hash of the canonical JSON serialization.
  std::string hash() const;

  friend bool operator==(const PerturbationPlan&,
                         const PerturbationPlan&) = default;
};

// R uniform train/test splits with |train| = round(ratio * N).
PerturbationPlan make_splits(std::size_t n_samples, double ratio,
                             std::size_t repeats, std::uint64_t base_seed);
PerturbationPlan make_splits(const TabularDataset& dataset, double ratio,
                             std::size_t repeats, std::uint64_t base_seed);

// R subsamples without replacement of size round(fraction * N).
PerturbationPlan make_subsamples(std::size_t n_samples, double fraction,
                                 std::size_t repeats, std::uint64_t base_seed);
PerturbationPlan make_subsamples(const TabularDataset& dataset, double fraction,
                                 std::size_t repeats, std::uint64_t base_seed);

// R additive-noise replicates over all samples; each repeat carries its own
// derived seed.
PerturbationPlan make_noise_plan(std::size_t n_samples, NoiseDistribution dist,
                                 double sigma, std::size_t repeats,
                                 std::uint64_t base_seed);

// Features plus i.i.d. noise of location 0 and scale sigma; target untouched.
TabularDataset apply_noise(const TabularDataset& dataset, NoiseDistribution dist,
                           double sigma, std::uint64_t repeat_seed);

// Evenly spaced inclusive grid from lo to hi.
std::vector<double> sigma_sweep(double lo, double hi, std::size_t steps);

}  // namespace stabx::perturb
