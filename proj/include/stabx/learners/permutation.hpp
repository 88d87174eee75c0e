#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stabx/core/dataset.hpp"
#include "stabx/core/types.hpp"
#include "stabx/learners/predictor.hpp"

namespace stabx::learners {

struct PermutationResult {
  // importance[j] = mean over repeats of (permuted error - baseline error).
  std::vector<double> importance;
  // per_repeat[j][r]: the increase observed in repeat r.
  std::vector<std::vector<double>> per_repeat;
  double baseline_error = 0.0;
};

// Misclassification rate for classifiers, mean squared error otherwise.
double prediction_error(const Predictor& model, const Eigen::MatrixXd& features,
                        const Eigen::VectorXd& truth);

// Permutes one column at a time, `repeats` times per column. Column j in
// repeat r uses the permutation seeded by derive_seed(derive_seed(seed, j), r).
PermutationResult permutation_importance_detail(const Predictor& model,
                                                const TabularDataset& test,
                                                std::size_t repeats, std::uint64_t seed);

FeatureRanking permutation_importance(const Predictor& model, const TabularDataset& test,
                                      std::size_t repeats = 10, std::uint64_t seed = 0);

}  // namespace stabx::learners
