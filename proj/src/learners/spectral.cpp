#include "stabx/learners/spectral.hpp"

#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "stabx/core/errors.hpp"
#include "stabx/learners/distance.hpp"
#include "stabx/learners/graph.hpp"
#include "stabx/learners/kmeans.hpp"

namespace stabx::learners {

std::string_view to_string(Affinity affinity) {
  return affinity == Affinity::knn ? "knn" : "rbf";
}

Affinity parse_affinity(std::string_view text) {
  if (text == "knn") return Affinity::knn;
  if (text == "rbf") return Affinity::rbf;
  throw ValidationError("unknown affinity '" + std::string(text) + "'");
}

Eigen::MatrixXd affinity_matrix(const Eigen::MatrixXd& data, Affinity affinity,
                                std::size_t n_neighbors, double gamma) {
  const Eigen::Index n = data.rows();
  if (n < 2) throw ValidationError("affinity needs at least 2 samples");
  if (affinity == Affinity::rbf) {
    if (!(gamma > 0.0)) throw ValidationError("rbf gamma must be positive");
    Eigen::MatrixXd w = (-gamma * pairwise_squared_euclidean(data).array()).exp();
    w.diagonal().setZero();
    return w;
  }
  std::size_t k = n_neighbors;
  if (k == 0) throw ValidationError("n_neighbors must be >= 1");
  if (k >= static_cast<std::size_t>(n)) {
    spdlog::warn("n_neighbors {} clamped to N-1 = {}", k, n - 1);
    k = static_cast<std::size_t>(n - 1);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const auto nbrs = knn_indices(data, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j : nbrs[static_cast<std::size_t>(i)]) a(i, static_cast<Eigen::Index>(j)) = 1.0;
  }
  return 0.5 * (a + a.transpose());
}

LaplacianSpectrum laplacian_spectrum(const Eigen::MatrixXd& affinity) {
  const Eigen::Index n = affinity.rows();
  LaplacianSpectrum out;
  connected_components(affinity, &out.components);
  const Eigen::VectorXd degree = affinity.rowwise().sum();
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
  Eigen::MatrixXd lap = -(inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal());
  for (Eigen::Index i = 0; i < n; ++i) lap(i, i) += degree(i) > 0.0 ? 1.0 : 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) throw Error("Laplacian eigendecomposition failed");
  out.values = solver.eigenvalues();
  out.vectors = inv_sqrt.asDiagonal() * solver.eigenvectors();
  fix_column_signs(out.vectors);
  return out;
}

ClusterLabeling spectral_cluster(const TabularDataset& data, int k,
                                 const SpectralOptions& options) {
  const auto n = static_cast<Eigen::Index>(data.n_samples());
  if (k < 1 || k > n) throw ValidationError("number of clusters must be in [1, N]");
  ClusterLabeling out{data.sample_ids(), std::vector<int>(static_cast<std::size_t>(n), 0), k};
  if (k == 1) return out;
  const Eigen::MatrixXd w = affinity_matrix(data.features(), options.affinity,
                                            options.n_neighbors, options.gamma.value_or(1.0));
  const LaplacianSpectrum spec = laplacian_spectrum(w);
  if (spec.components > static_cast<std::size_t>(k)) {
    throw ValidationError("affinity graph has " + std::to_string(spec.components) +
                          " connected components, more than " + std::to_string(k) +
                          " clusters; use more neighbors or the rbf affinity");
  }
  const Eigen::MatrixXd rows = spec.vectors.leftCols(k);
  KMeansOptions km;
  km.seed = options.seed;
  out.labels = kmeans_detail(rows, k, km).labels;
  out.validate();
  return out;
}

Embedding spectral_embedding_from_affinity(const std::vector<SampleId>& sample_ids,
                                           const Eigen::MatrixXd& affinity, std::size_t rank) {
  const auto n = static_cast<std::size_t>(affinity.rows());
  if (rank < 1 || rank + 1 > n) throw ValidationError("embedding rank must be in [1, N-1]");
  const LaplacianSpectrum spec = laplacian_spectrum(affinity);
  if (spec.components > 1) {
    throw ValidationError("affinity graph is disconnected (" + std::to_string(spec.components) +
                          " components)");
  }
  Embedding out{sample_ids, spec.vectors.middleCols(1, static_cast<Eigen::Index>(rank)), {}};
  const auto r = static_cast<Eigen::Index>(rank);
  if (rank + 1 < n && std::abs(spec.values(r) - spec.values(r + 1)) < 1e-8) {
    spdlog::warn("spectral embedding: eigenvalues {} and {} coincide", rank, rank + 1);
    out.flags.push_back("degenerate_spectrum");
  }
  out.validate();
  return out;
}

Embedding spectral_embedding(const TabularDataset& data, std::size_t rank,
                             const SpectralOptions& options) {
  const double gamma = options.gamma.value_or(1.0 / static_cast<double>(data.n_features()));
  return spectral_embedding_from_affinity(
      data.sample_ids(),
      affinity_matrix(data.features(), options.affinity, options.n_neighbors, gamma), rank);
}

}  // namespace stabx::learners
