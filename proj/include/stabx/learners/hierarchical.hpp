#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stabx/core/dataset.hpp"
#include "stabx/core/types.hpp"
#include "stabx/learners/distance.hpp"

namespace stabx::learners {

enum class Linkage { single, complete, average, ward };

inline constexpr Linkage kAllLinkages[] = {Linkage::single, Linkage::complete,
                                           Linkage::average, Linkage::ward};

std::string_view to_string(Linkage linkage);
Linkage parse_linkage(std::string_view text);

// One agglomeration step. `a` < `b` are the lowest original point indices of
// the two merged clusters; the merged cluster keeps `a`.
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

// Agglomerative clustering over a symmetric dissimilarity matrix with
// Lance-Williams updates. At each step the closest pair is merged; equal
// distances go to the lexicographically smallest (a, b). For Ward the input
// must be squared euclidean distances, and heights are
// 2|A||B|/(|A|+|B|) * ||mean(A) - mean(B)||^2.
std::vector<Merge> agglomerate(const Eigen::MatrixXd& dissimilarity, Linkage linkage);

// Labels after applying the first n - k merges, numbered by first appearance.
std::vector<int> cut_tree(std::size_t n, const std::vector<Merge>& merges, int k);

std::vector<int> hierarchical_labels(const Eigen::MatrixXd& data, int k, Linkage linkage,
                                     Distance distance);
ClusterLabeling hierarchical(const TabularDataset& data, int k, Linkage linkage,
                             Distance distance);

}  // namespace stabx::learners
