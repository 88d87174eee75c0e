#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "stabx/core/types.hpp"

namespace stabx::metrics {

// Row indices of the k nearest other rows of each embedding row (euclidean),
// nearest first; equal distances go to the earlier row.
std::vector<std::vector<std::size_t>> knn_sets(const Embedding& e, std::size_t k);

// Rows evaluated by the neighbor metrics: all rows when N <= cap, otherwise
// the cap rows with the smallest hash of (seed, sample id), in row order.
std::vector<std::size_t> evaluation_subset(const std::vector<SampleId>& sample_ids,
                                           std::size_t cap, std::uint64_t seed);

// Mean over evaluated rows of the Jaccard similarity of the two k-neighbor
// sets. Requires identical sample id sequences and k < N.
double nn_jaccard_at_k(const Embedding& a, const Embedding& b, std::size_t k,
                       std::size_t sample_cap = 500, std::uint64_t seed = 0);

// grid_size evenly spaced integers from 1 to N-1 (rounded, duplicates
// dropped).
std::vector<std::size_t> nn_k_grid(std::size_t n, std::size_t grid_size);

struct NnCurve {
  // Increasing neighborhood sizes ending with the analytic endpoint N.
  std::vector<std::size_t> k_grid;
  std::vector<double> scores;
  double auc = 0.0;
};

// Trapezoid area under (k, score) with k mapped to (k - 1) / (N - 1).
double curve_auc(const std::vector<std::size_t>& k_grid, const std::vector<double>& scores,
                 std::size_t n);

NnCurve nn_jaccard_auc(const Embedding& a, const Embedding& b, std::size_t grid_size = 50,
                       std::size_t sample_cap = 500, std::uint64_t seed = 0);

// Mean neighbor Jaccard at every k in the (unique, increasing) list, sharing
// one neighbor sort per evaluated row.
std::vector<double> nn_jaccard_sweep(const Embedding& a, const Embedding& b,
                                     const std::vector<std::size_t>& ks, std::size_t sample_cap,
                                     std::uint64_t seed);

}  // namespace stabx::metrics
