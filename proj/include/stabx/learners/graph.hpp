#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace stabx::learners {

// Indices of the k nearest other rows of `points` (euclidean), nearest first,
// distance ties broken by ascending index.
std::vector<std::vector<std::size_t>> knn_indices(const Eigen::MatrixXd& points,
                                                  std::size_t k);

// Component id per vertex of the graph whose edges are the positive entries
// of `weights`; ids are numbered in order of first vertex.
std::vector<std::size_t> connected_components(const Eigen::MatrixXd& weights,
                                              std::size_t* count);

// All-pairs shortest path lengths over the positive entries of `weights`
// (Dijkstra with a binary heap from every source). Unreachable pairs are +inf.
Eigen::MatrixXd all_pairs_shortest_paths(const Eigen::MatrixXd& weights);

// Flips the sign of each column so that its largest-magnitude entry (first
// one on ties) is positive.
void fix_column_signs(Eigen::MatrixXd& columns);

}  // namespace stabx::learners
