#include "stabx/learners/permutation.hpp"

#include <numeric>

#include "stabx/core/errors.hpp"
#include "stabx/core/random.hpp"

namespace stabx::learners {

double prediction_error(const Predictor& model, const Eigen::MatrixXd& features,
                        const Eigen::VectorXd& truth) {
  const Eigen::VectorXd pred = model.predict(features);
  if (pred.size() != truth.size()) throw ValidationError("prediction count differs from truth");
  if (model.is_classifier()) {
    return (pred.array() != truth.array()).cast<double>().mean();
  }
  return (pred - truth).squaredNorm() / static_cast<double>(truth.size());
}

PermutationResult permutation_importance_detail(const Predictor& model,
                                                const TabularDataset& test,
                                                std::size_t repeats, std::uint64_t seed) {
  if (!test.target()) throw ValidationError("permutation importance needs a target");
  if (repeats == 0) throw ValidationError("permutation importance needs repeats >= 1");
  const Eigen::VectorXd& truth = *test.target();
  const auto p = test.n_features();
  const auto n = test.n_samples();

  PermutationResult out;
  out.baseline_error = prediction_error(model, test.features(), truth);
  out.importance.assign(p, 0.0);
  out.per_repeat.assign(p, std::vector<double>(repeats, 0.0));

  Eigen::MatrixXd work = test.features();
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < p; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const Eigen::VectorXd original = work.col(col);
    const std::uint64_t column_seed = derive_seed(seed, j);
    for (std::size_t r = 0; r < repeats; ++r) {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      Rng rng(derive_seed(column_seed, r));
      rng.shuffle(perm);
      for (std::size_t i = 0; i < n; ++i) {
        work(static_cast<Eigen::Index>(i), col) = original(static_cast<Eigen::Index>(perm[i]));
      }
      const double delta = prediction_error(model, work, truth) - out.baseline_error;
      out.per_repeat[j][r] = delta;
      out.importance[j] += delta;
    }
    out.importance[j] /= static_cast<double>(repeats);
    work.col(col) = original;
  }
  return out;
}

FeatureRanking permutation_importance(const Predictor& model, const TabularDataset& test,
                                      std::size_t repeats, std::uint64_t seed) {
  return FeatureRanking::from_scores(
      permutation_importance_detail(model, test, repeats, seed).importance);
}

}  // namespace stabx::learners
