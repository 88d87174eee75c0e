#include "stabx/metrics/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "stabx/core/errors.hpp"
#include "stabx/core/random.hpp"

namespace stabx::metrics {
namespace {

// Other rows of `coords` sorted by (squared distance to row i, row index).
void neighbor_order(const Eigen::MatrixXd& coords, Eigen::Index i,
                    std::vector<std::pair<double, std::size_t>>& scratch,
                    std::vector<std::size_t>& out, std::size_t limit) {
  scratch.clear();
  for (Eigen::Index j = 0; j < coords.rows(); ++j) {
    if (j == i) continue;
    scratch.emplace_back((coords.row(i) - coords.row(j)).squaredNorm(), static_cast<std::size_t>(j));
  }
  const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(limit);
  std::partial_sort(scratch.begin(), mid, scratch.end());
  out.resize(limit);
  for (std::size_t m = 0; m < limit; ++m) out[m] = scratch[m].second;
}

void check_pair(const Embedding& a, const Embedding& b) {
  if (a.sample_ids != b.sample_ids) {
    throw ValidationError("embeddings cover different sample id sequences");
  }
  if (a.coords.rows() != static_cast<Eigen::Index>(a.sample_ids.size()) ||
      b.coords.rows() != static_cast<Eigen::Index>(b.sample_ids.size())) {
    throw ValidationError("embedding row count differs from its sample ids");
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> knn_sets(const Embedding& e, std::size_t k) {
  const auto n = static_cast<std::size_t>(e.coords.rows());
  if (k == 0 || k >= n) {
    throw ValidationError("neighbor count k = " + std::to_string(k) + " must lie in [1, N-1] for N = " +
                          std::to_string(n));
  }
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::pair<double, std::size_t>> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    neighbor_order(e.coords, static_cast<Eigen::Index>(i), scratch, out[i], k);
  }
  return out;
}

std::vector<std::size_t> evaluation_subset(const std::vector<SampleId>& sample_ids,
                                           std::size_t cap, std::uint64_t seed) {
  const std::size_t n = sample_ids.size();
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (cap == 0 || n <= cap) return rows;
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed(n);
  for (std::size_t i = 0; i < n; ++i) {
    keyed[i] = {derive_seed(seed, fnv1a64(sample_ids[i])), i};
  }
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(cap), keyed.end());
  rows.resize(cap);
  for (std::size_t m = 0; m < cap; ++m) rows[m] = keyed[m].second;
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::vector<double> nn_jaccard_sweep(const Embedding& a, const Embedding& b,
                                     const std::vector<std::size_t>& ks, std::size_t sample_cap,
                                     std::uint64_t seed) {
  check_pair(a, b);
  const std::size_t n = a.sample_ids.size();
  if (ks.empty()) return {};
  for (std::size_t m = 0; m < ks.size(); ++m) {
    if (ks[m] == 0 || ks[m] >= n || (m > 0 && ks[m] <= ks[m - 1])) {
      throw ValidationError("neighbor counts must be increasing and lie in [1, N-1]");
    }
  }
  const std::size_t max_k = ks.back();
  const std::vector<std::size_t> rows = evaluation_subset(a.sample_ids, sample_cap, seed);

  std::vector<double> sums(ks.size(), 0.0);
  std::vector<std::pair<double, std::size_t>> scratch;
  std::vector<std::size_t> order_a, order_b;
  // Membership stamps avoid clearing per row.
  std::vector<std::size_t> in_a(n, 0), in_b(n, 0);
  std::size_t stamp = 0;
  for (std::size_t i : rows) {
    ++stamp;
    neighbor_order(a.coords, static_cast<Eigen::Index>(i), scratch, order_a, max_k);
    neighbor_order(b.coords, static_cast<Eigen::Index>(i), scratch, order_b, max_k);
    std::size_t inter = 0;
    std::size_t next = 0;
    for (std::size_t m = 0; m < max_k && next < ks.size(); ++m) {
      in_a[order_a[m]] = stamp;
      inter += in_b[order_a[m]] == stamp;
      in_b[order_b[m]] = stamp;
      inter += in_a[order_b[m]] == stamp;
      const std::size_t k = m + 1;
      if (k == ks[next]) {
        sums[next] += static_cast<double>(inter) / static_cast<double>(2 * k - inter);
        ++next;
      }
    }
  }
  for (double& s : sums) s /= static_cast<double>(rows.size());
  return sums;
}

double nn_jaccard_at_k(const Embedding& a, const Embedding& b, std::size_t k,
                       std::size_t sample_cap, std::uint64_t seed) {
  return nn_jaccard_sweep(a, b, {k}, sample_cap, seed).front();
}

std::vector<std::size_t> nn_k_grid(std::size_t n, std::size_t grid_size) {
  if (n < 2) throw ValidationError("neighbor grid needs N >= 2");
  if (grid_size == 0) throw ValidationError("neighbor grid size must be >= 1");
  std::vector<std::size_t> grid;
  const double span = static_cast<double>(n - 2);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double t = grid_size == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const auto k = static_cast<std::size_t>(std::llround(1.0 + t * span));
    if (grid.empty() || k > grid.back()) grid.push_back(k);
  }
  return grid;
}

double curve_auc(const std::vector<std::size_t>& k_grid, const std::vector<double>& scores,
                 std::size_t n) {
  if (k_grid.size() != scores.size()) throw ValidationError("curve lengths differ");
  if (n < 2) throw ValidationError("curve needs N >= 2");
  // Divide once at the end so a constant curve of 1 integrates to exactly 1.
  double twice_area = 0.0;
  for (std::size_t m = 1; m < k_grid.size(); ++m) {
    twice_area += static_cast<double>(k_grid[m] - k_grid[m - 1]) * (scores[m] + scores[m - 1]);
  }
  return twice_area / (2.0 * static_cast<double>(n - 1));
}

NnCurve nn_jaccard_auc(const Embedding& a, const Embedding& b, std::size_t grid_size,
                       std::size_t sample_cap, std::uint64_t seed) {
  check_pair(a, b);
  const std::size_t n = a.sample_ids.size();
  NnCurve curve;
  curve.k_grid = nn_k_grid(n, grid_size);
  curve.scores = nn_jaccard_sweep(a, b, curve.k_grid, sample_cap, seed);
  curve.k_grid.push_back(n);
  curve.scores.push_back(1.0);
  curve.auc = curve_auc(curve.k_grid, curve.scores, n);
  return curve;
}

}  // namespace stabx::metrics
