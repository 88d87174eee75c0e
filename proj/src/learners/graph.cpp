#include "stabx/learners/graph.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

#include "stabx/core/errors.hpp"

namespace stabx::learners {

std::vector<std::vector<std::size_t>> knn_indices(const Eigen::MatrixXd& points,
                                                  std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k >= n) throw ValidationError("k nearest neighbors requires k < N");
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      cand.emplace_back((points.row(ii) - points.row(jj)).squaredNorm(), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k),
                      cand.end());
    out[i].reserve(k);
    for (std::size_t m = 0; m < k; ++m) out[i].push_back(cand[m].second);
  }
  return out;
}

std::vector<std::size_t> connected_components(const Eigen::MatrixXd& weights,
                                              std::size_t* count) {
  const auto n = static_cast<std::size_t>(weights.rows());
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> comp(n, kUnset);
  std::size_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != kUnset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (comp[v] == kUnset &&
            (weights(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0 ||
             weights(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) > 0)) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

Eigen::MatrixXd all_pairs_shortest_paths(const Eigen::MatrixXd& weights) {
  const auto n = static_cast<std::size_t>(weights.rows());
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (i != j && w > 0) adj[i].emplace_back(j, w);
    }
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(
      static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), kInf);
  using Entry = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    auto row = dist.row(static_cast<Eigen::Index>(s));
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    row(static_cast<Eigen::Index>(s)) = 0.0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > row(static_cast<Eigen::Index>(u))) continue;
      for (auto [v, w] : adj[u]) {
        const double nd = d + w;
        if (nd < row(static_cast<Eigen::Index>(v))) {
          row(static_cast<Eigen::Index>(v)) = nd;
          heap.emplace(nd, v);
        }
      }
    }
  }
  return dist;
}

void fix_column_signs(Eigen::MatrixXd& columns) {
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < columns.rows(); ++r) {
      const double a = std::abs(columns(r, c));
      // Relative slack so that sign choice is not decided by rounding noise
      // between entries of equal magnitude.
      if (a > best_abs * (1.0 + 1e-9) + 1e-300) {
        best_abs = a;
        best = r;
      }
    }
    if (columns(best, c) < 0) columns.col(c) *= -1.0;
  }
}

}  // namespace stabx::learners
