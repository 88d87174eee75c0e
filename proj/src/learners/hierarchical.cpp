#include "stabx/learners/hierarchical.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "stabx/core/errors.hpp"

namespace stabx::learners {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

double lance_williams(Linkage linkage, double d_ik, double d_jk, double d_ij, double n_i,
                      double n_j, double n_k) {
  switch (linkage) {
    case Linkage::single:
      return std::min(d_ik, d_jk);
    case Linkage::complete:
      return std::max(d_ik, d_jk);
    case Linkage::average:
      return (n_i * d_ik + n_j * d_jk) / (n_i + n_j);
    case Linkage::ward:
      return ((n_i + n_k) * d_ik + (n_j + n_k) * d_jk - n_k * d_ij) / (n_i + n_j + n_k);
  }
  return 0.0;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::string_view to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::single:
      return "single";
    case Linkage::complete:
      return "complete";
    case Linkage::average:
      return "average";
    case Linkage::ward:
      return "ward";
  }
  return "unknown";
}

Linkage parse_linkage(std::string_view text) {
  for (Linkage l : kAllLinkages) {
    if (to_string(l) == text) return l;
  }
  throw ValidationError("unknown linkage '" + std::string(text) + "'");
}

std::vector<Merge> agglomerate(const Eigen::MatrixXd& dissimilarity, Linkage linkage) {
  const auto n = static_cast<std::size_t>(dissimilarity.rows());
  if (dissimilarity.cols() != dissimilarity.rows()) {
    throw ValidationError("dissimilarity matrix must be square");
  }
  Eigen::MatrixXd d = dissimilarity;
  std::vector<bool> active(n, true);
  std::vector<double> size(n, 1.0);
  // Nearest active partner j > i of each active row i, smallest j on ties.
  std::vector<std::size_t> nn(n, kNone);
  std::vector<double> nn_d(n, std::numeric_limits<double>::infinity());
  auto at = [&d](std::size_t i, std::size_t j) -> double& {
    return d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  auto refresh = [&](std::size_t i) {
    nn[i] = kNone;
    nn_d[i] = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n; ++j) {
      if (active[j] && at(i, j) < nn_d[i]) {
        nn_d[i] = at(i, j);
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  std::vector<Merge> merges;
  merges.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = kNone;
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i] && nn[i] != kNone && (a == kNone || nn_d[i] < nn_d[a])) a = i;
    }
    const std::size_t b = nn[a];
    const double height = nn_d[a];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double v =
          lance_williams(linkage, at(a, k), at(b, k), height, size[a], size[b], size[k]);
      at(a, k) = v;
      at(k, a) = v;
    }
    active[b] = false;
    size[a] += size[b];
    merges.push_back({a, b, height, static_cast<std::size_t>(size[a])});

    for (std::size_t r = 0; r < n; ++r) {
      if (!active[r]) continue;
      if (r == a || nn[r] == a || nn[r] == b) {
        refresh(r);
      } else if (r < a && (at(r, a) < nn_d[r] || (at(r, a) == nn_d[r] && a < nn[r]))) {
        nn_d[r] = at(r, a);
        nn[r] = a;
      }
    }
  }
  return merges;
}

std::vector<int> cut_tree(std::size_t n, const std::vector<Merge>& merges, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw ValidationError("cannot cut " + std::to_string(n) + " points into " +
                          std::to_string(k) + " clusters");
  }
  if (merges.size() + 1 < n) throw ValidationError("merge sequence is incomplete");
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t m = 0; m < n - static_cast<std::size_t>(k); ++m) {
    const std::size_t ra = find_root(parent, merges[m].a);
    const std::size_t rb = find_root(parent, merges[m].b);
    parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<int> code(n, -1);
  std::vector<int> labels(n);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find_root(parent, i);
    if (code[root] < 0) code[root] = next++;
    labels[i] = code[root];
  }
  return labels;
}

std::vector<int> hierarchical_labels(const Eigen::MatrixXd& data, int k, Linkage linkage,
                                     Distance distance) {
  if (linkage == Linkage::ward && distance != Distance::euclidean) {
    throw ValidationError("ward linkage requires euclidean distance");
  }
  const auto n = static_cast<std::size_t>(data.rows());
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw ValidationError("number of clusters must be in [1, N]");
  }
  const Eigen::MatrixXd d = linkage == Linkage::ward ? pairwise_squared_euclidean(data)
                                                     : pairwise_distances(data, distance);
  return cut_tree(n, agglomerate(d, linkage), k);
}

ClusterLabeling hierarchical(const TabularDataset& data, int k, Linkage linkage,
                             Distance distance) {
  ClusterLabeling out{data.sample_ids(),
                      hierarchical_labels(data.features(), k, linkage, distance), k};
  out.validate();
  return out;
}

}  // namespace stabx::learners
