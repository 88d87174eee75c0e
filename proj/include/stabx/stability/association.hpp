#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace stabx::stability {

struct AssociationFit {
  // False when x has zero variance; slope and intercept are then undefined.
  bool valid = false;
  double slope = 0.0;
  double intercept = 0.0;
  std::optional<double> t_statistic;
  // Two-sided p-value for the slope; absent when n < 3.
  std::optional<double> p_value;
  std::optional<double> p_corrected;
  std::size_t n = 0;
  std::size_t m_tests = 1;
  std::string flag;
};

// Two-sided tail probability of Student's t with `df` degrees of freedom,
// I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided(double t, double df);

// min(1, p * m).
double bonferroni(double p, std::size_t m);

// OLS of y on x. A slope of exactly 0 gives t = 0 and p = 1; zero residuals
// with a nonzero slope give p = 0.
AssociationFit fit_association(std::span<const double> x, std::span<const double> y,
                               std::size_t m_tests);

}  // namespace stabx::stability
