#include "stabx/learners/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <spdlog/spdlog.h>

#include "stabx/core/errors.hpp"
#include "stabx/core/random.hpp"
#include "stabx/learners/distance.hpp"
#include "stabx/learners/graph.hpp"

namespace stabx::learners {
namespace {

Embedding wrap(const TabularDataset& data, Eigen::MatrixXd coords,
               std::vector<std::string> flags = {}) {
  Embedding e{data.sample_ids(), std::move(coords), std::move(flags)};
  e.validate();
  return e;
}

}  // namespace

Eigen::MatrixXd pca_coords(const Eigen::MatrixXd& data, std::size_t rank,
                           Eigen::MatrixXd* loadings) {
  const auto limit = static_cast<std::size_t>(std::min(data.rows(), data.cols()));
  if (rank < 1 || rank > limit) {
    throw ValidationError("PCA rank " + std::to_string(rank) + " outside [1, min(N, P) = " +
                          std::to_string(limit) + "]");
  }
  Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  Eigen::MatrixXd v = svd.matrixV().leftCols(static_cast<Eigen::Index>(rank));
  fix_column_signs(v);
  if (loadings) *loadings = v;
  return centered * v;
}

Embedding pca(const TabularDataset& data, std::size_t rank) {
  return wrap(data, pca_coords(data.features(), rank));
}

Eigen::MatrixXd random_projection_coords(const Eigen::MatrixXd& data, std::size_t rank,
                                         std::uint64_t seed, const Eigen::MatrixXd* projection) {
  if (rank < 1) throw ValidationError("projection rank must be >= 1");
  const auto r = static_cast<Eigen::Index>(rank);
  Eigen::MatrixXd g;
  if (projection) {
    if (projection->rows() != data.cols() || projection->cols() != r) {
      throw ValidationError("projection matrix has the wrong shape");
    }
    g = *projection;
  } else {
    g.resize(data.cols(), r);
    Rng rng(seed);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < r; ++j) g(i, j) = rng.normal();
    }
  }
  return data * g / std::sqrt(static_cast<double>(rank));
}

Embedding random_projection(const TabularDataset& data, std::size_t rank, std::uint64_t seed) {
  return wrap(data, random_projection_coords(data.features(), rank, seed));
}

Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& distances, std::size_t rank,
                              std::vector<std::string>* flags) {
  const Eigen::Index n = distances.rows();
  if (distances.cols() != n) throw ValidationError("distance matrix must be square");
  if (rank < 1 || static_cast<Eigen::Index>(rank) > n) {
    throw ValidationError("MDS rank must be in [1, N]");
  }
  Eigen::MatrixXd b = distances.array().square().matrix();
  const Eigen::VectorXd row_mean = b.rowwise().mean();
  const Eigen::RowVectorXd col_mean = b.colwise().mean();
  const double all_mean = b.mean();
  b.colwise() -= row_mean;
  b.rowwise() -= col_mean;
  b.array() += all_mean;
  b *= -0.5;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) throw Error("MDS eigendecomposition failed");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  const double scale = std::max(values.cwiseAbs().maxCoeff(), 1.0);

  const auto r = static_cast<Eigen::Index>(rank);
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(n, r);
  Eigen::Index padded = 0;
  for (Eigen::Index c = 0; c < r; ++c) {
    const Eigen::Index idx = n - 1 - c;
    const double lambda = values(idx);
    if (lambda > 1e-10 * scale) {
      coords.col(c) = vectors.col(idx) * std::sqrt(lambda);
    } else {
      ++padded;
    }
  }
  fix_column_signs(coords);
  if (padded > 0) {
    spdlog::warn("MDS: {} of {} coordinates zero-padded (non-positive eigenvalues)", padded, r);
    if (flags) flags->push_back("zero_padded");
  }
  return coords;
}

Embedding metric_mds(const TabularDataset& data, std::size_t rank) {
  std::vector<std::string> flags;
  Eigen::MatrixXd coords =
      classical_mds(pairwise_distances(data.features(), Distance::euclidean), rank, &flags);
  return wrap(data, std::move(coords), std::move(flags));
}

Embedding isomap(const TabularDataset& data, std::size_t rank, std::size_t n_neighbors) {
  const Eigen::MatrixXd& x = data.features();
  const auto n = static_cast<std::size_t>(x.rows());
  if (n_neighbors == 0) throw ValidationError("n_neighbors must be >= 1");
  if (n_neighbors >= n) {
    spdlog::warn("isomap: n_neighbors {} clamped to N-1 = {}", n_neighbors, n - 1);
    n_neighbors = n - 1;
  }
  const auto nbrs = knn_indices(x, n_neighbors);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(x.rows(), x.rows());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j : nbrs[i]) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double d = (x.row(ii) - x.row(jj)).norm();
      // Zero-length edges between duplicate points still connect them.
      const double weight = d > 0.0 ? d : std::numeric_limits<double>::min();
      w(ii, jj) = weight;
      w(jj, ii) = weight;
    }
  }
  std::size_t components = 0;
  connected_components(w, &components);
  if (components > 1) {
    throw ValidationError("isomap neighborhood graph is disconnected (" +
                          std::to_string(components) + " components); increase n_neighbors");
  }
  std::vector<std::string> flags;
  Eigen::MatrixXd coords = classical_mds(all_pairs_shortest_paths(w), rank, &flags);
  return wrap(data, std::move(coords), std::move(flags));
}

}  // namespace stabx::learners
