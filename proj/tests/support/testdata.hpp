#pragma once

#include <stdlib.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stabx/core/dataset.hpp"
#include "stabx/core/random.hpp"

namespace stabx::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "stabx-test-XXXXXX").string();
    path_ = ::mkdtemp(pattern.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<SampleId> row_ids(std::size_t n, const std::string& prefix = "s") {
  std::vector<SampleId> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

inline std::vector<std::string> column_names(std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

inline Eigen::MatrixXd normal_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

// y = X beta + noise_sd * e with X and e standard normal. The same seed gives
// the same X and e for every noise_sd.
inline TabularDataset linear_regression_data(std::size_t n, const std::vector<double>& beta,
                                             std::size_t p, double noise_sd, std::uint64_t seed) {
  const Eigen::MatrixXd x = normal_matrix(n, p, seed);
  const Eigen::MatrixXd e = normal_matrix(n, 1, derive_seed(seed, 1));
  Eigen::VectorXd y = noise_sd * e.col(0);
  for (std::size_t j = 0; j < beta.size(); ++j) y += beta[j] * x.col(static_cast<Eigen::Index>(j));
  return TabularDataset(row_ids(n), x, column_names(p), y, TaskKind::regression);
}

struct Blobs {
  Eigen::MatrixXd points;
  std::vector<int> truth;
};

// Equal-sized isotropic Gaussian blobs; point i belongs to blob i % centers.
inline Blobs gaussian_blobs(std::size_t n, const Eigen::MatrixXd& centers, double sd, std::uint64_t seed) {
  Rng rng(seed);
  Blobs b;
  b.points.resize(static_cast<Eigen::Index>(n), centers.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i % static_cast<std::size_t>(centers.rows()));
    for (Eigen::Index j = 0; j < centers.cols(); ++j) {
      b.points(static_cast<Eigen::Index>(i), j) = centers(c, j) + sd * rng.normal();
    }
    b.truth.push_back(static_cast<int>(c));
  }
  return b;
}

inline TabularDataset unsupervised(const Eigen::MatrixXd& points) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto p = static_cast<std::size_t>(points.cols());
  return TabularDataset(row_ids(n), points, column_names(p), std::nullopt, TaskKind::unsupervised);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace stabx::testing
