#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stabx/core/dataset.hpp"
#include "stabx/core/types.hpp"

namespace stabx::learners {

enum class Affinity { knn, rbf };

std::string_view to_string(Affinity affinity);
Affinity parse_affinity(std::string_view text);

struct SpectralOptions {
  Affinity affinity = Affinity::knn;
  std::size_t n_neighbors = 10;
  // RBF exp(-gamma ||x - y||^2). Unset: 1 for clustering, 1/P for embedding.
  std::optional<double> gamma;
  std::uint64_t seed = 0;
};

// Symmetric affinity with zero diagonal. kNN: 0/1 connectivity symmetrized
// as (A + A^T) / 2.
Eigen::MatrixXd affinity_matrix(const Eigen::MatrixXd& data, Affinity affinity,
                                std::size_t n_neighbors, double gamma);

struct LaplacianSpectrum {
  // Ascending eigenvalues of I - D^{-1/2} W D^{-1/2}.
  Eigen::VectorXd values;
  // Columns D^{-1/2} u for each eigenvector u, signs fixed.
  Eigen::MatrixXd vectors;
  std::size_t components = 0;
};

LaplacianSpectrum laplacian_spectrum(const Eigen::MatrixXd& affinity);

ClusterLabeling spectral_cluster(const TabularDataset& data, int k,
                                 const SpectralOptions& options = {});

// Bottom r nontrivial eigenvectors. Adds the flag "degenerate_spectrum" when
// eigenvalue r and r+1 coincide within 1e-8.
Embedding spectral_embedding_from_affinity(const std::vector<SampleId>& sample_ids,
                                           const Eigen::MatrixXd& affinity, std::size_t rank);
Embedding spectral_embedding(const TabularDataset& data, std::size_t rank,
                             const SpectralOptions& options = {});

}  // namespace stabx::learners
