#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace stabx::learners {

enum class Distance { euclidean, manhattan, chebyshev, cosine, canberra };

// Enumeration order; also the tie-break order when choosing a distance by
// clustering accuracy.
inline constexpr Distance kAllDistances[] = {
    Distance::euclidean, Distance::manhattan, Distance::chebyshev,
    Distance::cosine, Distance::canberra};

std::string_view to_string(Distance d);
Distance parse_distance(std::string_view text);

// Distance between two points given as row vectors. Cosine distance is
// 1 - cos; a zero vector against a nonzero one is at distance 1, two zero
// vectors at distance 0. Canberra terms with 0/0 contribute 0.
double distance(Distance d, const Eigen::Ref<const Eigen::RowVectorXd>& a,
                const Eigen::Ref<const Eigen::RowVectorXd>& b);

// Symmetric N x N matrix of pairwise distances between the rows of `points`.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points, Distance d);

// Squared euclidean distances between rows.
Eigen::MatrixXd pairwise_squared_euclidean(const Eigen::MatrixXd& points);

}  // namespace stabx::learners
