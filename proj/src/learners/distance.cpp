#include "stabx/learners/distance.hpp"

#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "stabx/core/errors.hpp"

namespace stabx::learners {

std::string_view to_string(Distance d) {
  switch (d) {
    case Distance::euclidean:
      return "euclidean";
    case Distance::manhattan:
      return "manhattan";
    case Distance::chebyshev:
      return "chebyshev";
    case Distance::cosine:
      return "cosine";
    case Distance::canberra:
      return "canberra";
  }
  return "unknown";
}

Distance parse_distance(std::string_view text) {
  for (Distance d : kAllDistances) {
    if (to_string(d) == text) return d;
  }
  throw ValidationError("unknown distance '" + std::string(text) + "'");
}

double distance(Distance d, const Eigen::Ref<const Eigen::RowVectorXd>& a,
                const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  switch (d) {
    case Distance::euclidean:
      return (a - b).norm();
    case Distance::manhattan:
      return (a - b).cwiseAbs().sum();
    case Distance::chebyshev:
      return (a - b).cwiseAbs().maxCoeff();
    case Distance::cosine: {
      const double na = a.norm();
      const double nb = b.norm();
      if (na == 0.0 || nb == 0.0) {
        if (na == 0.0 && nb == 0.0) return 0.0;
        spdlog::debug("cosine distance against a zero vector defined as 1");
        return 1.0;
      }
      const double c = a.dot(b) / (na * nb);
      return std::max(0.0, 1.0 - std::clamp(c, -1.0, 1.0));
    }
    case Distance::canberra: {
      double s = 0.0;
      for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double den = std::abs(a(j)) + std::abs(b(j));
        if (den > 0.0) s += std::abs(a(j) - b(j)) / den;
      }
      return s;
    }
  }
  return 0.0;
}

Eigen::MatrixXd pairwise_squared_euclidean(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (points.row(i) - points.row(j)).squaredNorm();
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points, Distance d) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd out(n, n);
  std::size_t zero_rows = 0;
  if (d == Distance::cosine) {
    for (Eigen::Index i = 0; i < n; ++i) zero_rows += points.row(i).norm() == 0.0;
    if (zero_rows > 0) {
      spdlog::warn("cosine distance: {} zero vector(s); distance to them set to 1",
                   zero_rows);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = distance(d, points.row(i), points.row(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace stabx::learners
