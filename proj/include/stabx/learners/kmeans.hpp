#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stabx/core/dataset.hpp"
#include "stabx/core/random.hpp"
#include "stabx/core/types.hpp"

namespace stabx::learners {

enum class KMeansInit { random, kmeanspp };

std::string_view to_string(KMeansInit init);

struct KMeansOptions {
  KMeansInit init = KMeansInit::kmeanspp;
  std::size_t max_iter = 300;
  // Independent restarts; the run with the lowest inertia wins (first on ties).
  std::size_t n_init = 10;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double inertia = 0.0;
  // Inertia after every assignment step.
  std::vector<double> inertia_trace;
  std::size_t iterations = 0;
  std::size_t reseeds = 0;
};

// k starting centers drawn from the rows of `data`: distinct uniform rows, or
// k-means++ D^2 sampling.
Eigen::MatrixXd initial_centers(const Eigen::MatrixXd& data, int k, KMeansInit init, Rng& rng);

// Nearest center per row; ties go to the lowest center index.
std::vector<int> assign_nearest(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centers,
                                double* inertia = nullptr);

// Lloyd iterations from the given centers until the assignment repeats or
// max_iter updates have run. An empty cluster is reseeded at the row
// farthest from its current center.
KMeansResult lloyd(const Eigen::MatrixXd& data, Eigen::MatrixXd centers, std::size_t max_iter);

KMeansResult kmeans_detail(const Eigen::MatrixXd& data, int k, const KMeansOptions& options);
ClusterLabeling kmeans(const TabularDataset& data, int k, const KMeansOptions& options = {});

struct MiniBatchOptions {
  std::size_t batch_size = 100;
  std::size_t max_iter = 100;
  std::uint64_t seed = 0;
};

// Mini-batch k-means with per-center learning rate 1/count. When
// batch_size >= N every iteration uses all rows in index order. `init`
// overrides the k-means++ starting centers.
KMeansResult minibatch_kmeans_detail(const Eigen::MatrixXd& data, int k,
                                     const MiniBatchOptions& options,
                                     const Eigen::MatrixXd* init = nullptr);
ClusterLabeling minibatch_kmeans(const TabularDataset& data, int k,
                                 const MiniBatchOptions& options = {});

}  // namespace stabx::learners
