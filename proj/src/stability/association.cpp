#include "stabx/stability/association.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <spdlog/spdlog.h>

#include "stabx/core/errors.hpp"

namespace stabx::stability {

double student_t_two_sided(double t, double df) {
  if (!(df > 0.0)) throw ValidationError("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t));
}

double bonferroni(double p, std::size_t m) {
  if (m == 0) throw ValidationError("number of tests must be >= 1");
  return std::min(1.0, p * static_cast<double>(m));
}

AssociationFit fit_association(std::span<const double> x, std::span<const double> y,
                               std::size_t m_tests) {
  if (x.size() != y.size()) throw ValidationError("x and y differ in length");
  AssociationFit fit;
  fit.n = x.size();
  fit.m_tests = m_tests;
  if (fit.n < 2) {
    fit.flag = "fewer than 2 points";
    return fit;
  }
  const double n = static_cast<double>(fit.n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    fit.flag = "zero variance in x";
    spdlog::warn("association fit skipped: x has zero variance");
    return fit;
  }
  fit.valid = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (fit.n < 3) {
    fit.flag = "fewer than 3 points, no p-value";
    return fit;
  }
  const double df = n - 2.0;
  double ssr = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += r * r;
  }
  if (fit.slope == 0.0) {
    fit.t_statistic = 0.0;
    fit.p_value = 1.0;
  } else if (ssr == 0.0) {
    fit.t_statistic = std::copysign(INFINITY, fit.slope);
    fit.p_value = 0.0;
  } else {
    const double se = std::sqrt(ssr / df / sxx);
    fit.t_statistic = fit.slope / se;
    fit.p_value = student_t_two_sided(*fit.t_statistic, df);
  }
  fit.p_corrected = bonferroni(*fit.p_value, m_tests);
  return fit;
}

}  // namespace stabx::stability
