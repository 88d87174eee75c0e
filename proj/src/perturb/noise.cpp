#include <cmath>

#include "stabx/core/errors.hpp"
#include "stabx/core/random.hpp"
#include "stabx/perturb/plan.hpp"

namespace stabx::perturb {

TabularDataset apply_noise(const TabularDataset& dataset, NoiseDistribution dist,
                           double sigma, std::uint64_t repeat_seed) {
  if (sigma < 0.0 || !std::isfinite(sigma)) {
    throw ValidationError("noise scale must be finite and >= 0");
  }
  if (sigma == 0.0) return dataset;

  Eigen::MatrixXd x = dataset.features();
  Rng rng(repeat_seed);
  // Row-major draw order, independent of Eigen's storage order.
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double z = dist == NoiseDistribution::normal ? rng.normal() : rng.laplace();
      x(i, j) += sigma * z;
    }
  }
  return dataset.with_features(std::move(x));
}

}  // namespace stabx::perturb
