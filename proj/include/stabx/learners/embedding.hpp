#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "stabx/core/dataset.hpp"
#include "stabx/core/types.hpp"

namespace stabx::learners {

// Projection of the centered data onto the top-r right singular vectors;
// each loading vector is signed so its largest-magnitude entry is positive.
Eigen::MatrixXd pca_coords(const Eigen::MatrixXd& data, std::size_t rank,
                           Eigen::MatrixXd* loadings = nullptr);
Embedding pca(const TabularDataset& data, std::size_t rank);

// X G / sqrt(r) with G a P x r standard normal matrix drawn row by row.
// `projection` replaces G (test hook).
Eigen::MatrixXd random_projection_coords(const Eigen::MatrixXd& data, std::size_t rank,
                                         std::uint64_t seed,
                                         const Eigen::MatrixXd* projection = nullptr);
Embedding random_projection(const TabularDataset& data, std::size_t rank, std::uint64_t seed);

// Classical MDS from a matrix of (unsquared) distances: top-r eigenpairs of
// the double-centered squared distances, coords = V sqrt(Lambda). Missing
// positive eigenvalues give zero columns and the flag "zero_padded".
Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& distances, std::size_t rank,
                              std::vector<std::string>* flags = nullptr);
Embedding metric_mds(const TabularDataset& data, std::size_t rank);

// Classical MDS on shortest-path distances of the symmetrized euclidean kNN
// graph.
Embedding isomap(const TabularDataset& data, std::size_t rank, std::size_t n_neighbors = 5);

}  // namespace stabx::learners
