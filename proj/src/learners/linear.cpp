#include "stabx/learners/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stabx/core/errors.hpp"

namespace stabx::learners {
namespace {

struct Centered {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::RowVectorXd x_mean;
  double y_mean = 0.0;
};

Centered center(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool fit_intercept) {
  Centered c{x, y, Eigen::RowVectorXd::Zero(x.cols()), 0.0};
  if (fit_intercept && x.rows() > 0) {
    c.x_mean = x.colwise().mean();
    c.y_mean = y.mean();
    c.x.rowwise() -= c.x_mean;
    c.y.array() -= c.y_mean;
  }
  return c;
}

void check_shapes(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw ValidationError("design and response row counts differ");
  if (x.rows() == 0 || x.cols() == 0) throw ValidationError("empty design matrix");
}

// Ridge solutions for many penalties from one thin SVD.
class RidgePath {
 public:
  explicit RidgePath(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    s_ = svd.singularValues();
    v_ = svd.matrixV();
    uty_ = svd.matrixU().transpose() * y;
    cutoff_ = s_.size() > 0 ? s_(0) * 1e-12 * static_cast<double>(std::max(x.rows(), x.cols()))
                            : 0.0;
  }

  Eigen::VectorXd solve(double lambda) const {
    Eigen::VectorXd w(s_.size());
    for (Eigen::Index i = 0; i < s_.size(); ++i) {
      const double s = s_(i);
      w(i) = s > cutoff_ ? s / (s * s + lambda) * uty_(i) : 0.0;
    }
    return v_ * w;
  }

 private:
  Eigen::VectorXd s_;
  Eigen::MatrixXd v_;
  Eigen::VectorXd uty_;
  double cutoff_ = 0.0;
};

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Duality gap of the N-scaled lasso objective 0.5||r||^2 + N lambda ||b||_1.
double duality_gap(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& beta, const Eigen::VectorXd& r,
                   double n_lambda) {
  const double r_norm2 = r.squaredNorm();
  const double dual_norm = x.cols() > 0 ? (x.transpose() * r).cwiseAbs().maxCoeff() : 0.0;
  double scale = 1.0;
  double gap = r_norm2;
  if (dual_norm > n_lambda) {
    scale = n_lambda / dual_norm;
    gap = 0.5 * (r_norm2 + r_norm2 * scale * scale);
  }
  gap += n_lambda * beta.lpNorm<1>() - scale * r.dot(y);
  return std::max(gap, 0.0);
}

Eigen::VectorXd lasso_centered(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               double lambda, const LassoOptions& options,
                               const Eigen::VectorXd* warm_start) {
  const Eigen::Index p = x.cols();
  const double n = static_cast<double>(x.rows());
  const double n_lambda = n * lambda;
  Eigen::VectorXd beta = warm_start ? *warm_start : Eigen::VectorXd::Zero(p);
  if (beta.size() != p) throw ValidationError("warm start has the wrong length");
  const Eigen::VectorXd col_norm2 = x.colwise().squaredNorm().transpose();
  Eigen::VectorXd r = y - x * beta;
  const double tol = options.tol * y.squaredNorm();
  double gap = std::numeric_limits<double>::infinity();

  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double max_delta = 0.0;
    double max_abs = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_norm2(j) == 0.0) {
        beta(j) = 0.0;
        continue;
      }
      const double old = beta(j);
      const double rho = x.col(j).dot(r) + col_norm2(j) * old;
      const double next = soft_threshold(rho, n_lambda) / col_norm2(j);
      if (next != old) {
        r.noalias() -= (next - old) * x.col(j);
        beta(j) = next;
      }
      max_delta = std::max(max_delta, std::abs(next - old));
      max_abs = std::max(max_abs, std::abs(next));
    }
    const bool settled = max_abs == 0.0 || max_delta / max_abs <= options.tol;
    // Without a penalty the dual point collapses to 0 and the gap stays at
    // ||r||^2 / 2, so only the coordinate change can signal convergence.
    if (settled && n_lambda == 0.0) return beta;
    if (settled || sweep + 1 == options.max_sweeps) {
      gap = duality_gap(x, y, beta, r, n_lambda);
      if (gap <= tol) return beta;
    }
  }
  throw ConvergenceError("lasso coordinate descent did not converge after " +
                             std::to_string(options.max_sweeps) + " sweeps (duality gap " +
                             std::to_string(gap) + ")",
                         gap);
}

LinearModelFit finish(const Centered& c, Eigen::VectorXd beta, double lambda, Penalty penalty) {
  LinearModelFit fit;
  fit.intercept = c.y_mean - c.x_mean.dot(beta);
  fit.coefficients = std::move(beta);
  fit.lambda = lambda;
  fit.penalty = penalty;
  return fit;
}

}  // namespace

std::string_view to_string(Penalty penalty) {
  return penalty == Penalty::l1 ? "l1" : "l2";
}

LinearModelFit ridge_fixed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                           bool fit_intercept) {
  check_shapes(x, y);
  if (!(lambda >= 0.0)) throw ValidationError("penalty must be >= 0");
  const Centered c = center(x, y, fit_intercept);
  return finish(c, RidgePath(c.x, c.y).solve(lambda), lambda, Penalty::l2);
}

LinearModelFit lasso_fixed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                           bool fit_intercept, const LassoOptions& options,
                           const Eigen::VectorXd* warm_start) {
  check_shapes(x, y);
  if (!(lambda >= 0.0)) throw ValidationError("penalty must be >= 0");
  const Centered c = center(x, y, fit_intercept);
  return finish(c, lasso_centered(c.x, c.y, lambda, options, warm_start), lambda, Penalty::l1);
}

double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool fit_intercept) {
  check_shapes(x, y);
  const Centered c = center(x, y, fit_intercept);
  return (c.x.transpose() * c.y).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

double ridge_lambda_max(const Eigen::MatrixXd& x, bool fit_intercept) {
  Eigen::MatrixXd xc = x;
  if (fit_intercept) xc.rowwise() -= x.colwise().mean();
  return 100.0 * xc.colwise().squaredNorm().mean();
}

std::vector<double> lambda_grid(double lambda_max, std::size_t count, double ratio) {
  if (count == 0) throw ValidationError("lambda grid is empty");
  if (!(lambda_max >= 0.0) || !(ratio > 0.0 && ratio <= 1.0)) {
    throw ValidationError("invalid lambda grid bounds");
  }
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    grid[i] = lambda_max * std::pow(ratio, t);
  }
  return grid;
}

LinearModelFit fit_cv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Penalty penalty,
                      const CvOptions& options) {
  check_shapes(x, y);
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t k = options.folds;
  if (k < 2) throw ValidationError("cross-validation needs at least 2 folds");
  if (n <= k) {
    throw ValidationError("cross-validation needs more rows (" + std::to_string(n) +
                          ") than folds (" + std::to_string(k) + ")");
  }
  const double top = penalty == Penalty::l1 ? lasso_lambda_max(x, y, options.fit_intercept)
                                            : ridge_lambda_max(x, options.fit_intercept);
  const std::vector<double> grid = lambda_grid(top, options.grid_size, options.grid_ratio);

  std::vector<double> mse(grid.size(), 0.0);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t lo = f * n / k;
    const std::size_t hi = (f + 1) * n / k;
    const auto n_val = static_cast<Eigen::Index>(hi - lo);
    const auto n_fit = static_cast<Eigen::Index>(n - (hi - lo));
    Eigen::MatrixXd x_fit(n_fit, x.cols());
    Eigen::VectorXd y_fit(n_fit);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= lo && i < hi) continue;
      x_fit.row(row) = x.row(static_cast<Eigen::Index>(i));
      y_fit(row) = y(static_cast<Eigen::Index>(i));
      ++row;
    }
    const Eigen::MatrixXd x_val = x.middleRows(static_cast<Eigen::Index>(lo), n_val);
    const Eigen::VectorXd y_val = y.segment(static_cast<Eigen::Index>(lo), n_val);

    const Centered c = center(x_fit, y_fit, options.fit_intercept);
    auto score = [&](const Eigen::VectorXd& beta) {
      const double intercept = c.y_mean - c.x_mean.dot(beta);
      return ((x_val * beta).array() + intercept - y_val.array()).square().mean();
    };
    if (penalty == Penalty::l2) {
      const RidgePath path(c.x, c.y);
      for (std::size_t g = 0; g < grid.size(); ++g) mse[g] += score(path.solve(grid[g]));
    } else {
      Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
      for (std::size_t g = 0; g < grid.size(); ++g) {
        beta = lasso_centered(c.x, c.y, grid[g], options.lasso, &beta);
        mse[g] += score(beta);
      }
    }
  }

  // Grid is descending, so keeping the first minimum sends ties to the larger
  // penalty.
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (mse[g] < mse[best]) best = g;
  }
  return penalty == Penalty::l1
             ? lasso_fixed(x, y, grid[best], options.fit_intercept, options.lasso)
             : ridge_fixed(x, y, grid[best], options.fit_intercept);
}

LinearModel LinearModel::fit(const TabularDataset& train, Penalty penalty,
                             const CvOptions& options) {
  if (!train.target()) throw ValidationError("linear models need a target column");
  const Eigen::VectorXd& target = *train.target();
  LinearModel model;
  model.classifier_ = train.task_kind() == TaskKind::classification;
  if (!model.classifier_) {
    model.fits_.push_back(fit_cv(train.features(), target, penalty, options));
    return model;
  }
  for (std::size_t c = 0; c < train.num_classes(); ++c) {
    const Eigen::VectorXd indicator =
        (target.array() == static_cast<double>(c)).cast<double>().matrix();
    model.fits_.push_back(fit_cv(train.features(), indicator, penalty, options));
  }
  return model;
}

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& features) const {
  if (fits_.empty()) throw ValidationError("model is not fitted");
  if (features.cols() != fits_.front().coefficients.size()) {
    throw ValidationError("feature count differs from the fitted model");
  }
  if (!classifier_) {
    const auto& f = fits_.front();
    return (features * f.coefficients).array() + f.intercept;
  }
  Eigen::MatrixXd scores(features.rows(), static_cast<Eigen::Index>(fits_.size()));
  for (std::size_t c = 0; c < fits_.size(); ++c) {
    scores.col(static_cast<Eigen::Index>(c)) =
        (features * fits_[c].coefficients).array() + fits_[c].intercept;
  }
  Eigen::VectorXd labels(features.rows());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    Eigen::Index arg = 0;
    scores.row(i).maxCoeff(&arg);
    labels(i) = static_cast<double>(arg);
  }
  return labels;
}

std::vector<double> LinearModel::importance() const {
  if (fits_.empty()) throw ValidationError("model is not fitted");
  Eigen::VectorXd total = Eigen::VectorXd::Zero(fits_.front().coefficients.size());
  for (const auto& f : fits_) total += f.coefficients.cwiseAbs();
  total /= static_cast<double>(fits_.size());
  return {total.data(), total.data() + total.size()};
}

FeatureRanking fit_ridge(const TabularDataset& train, std::size_t folds) {
  CvOptions options;
  options.folds = folds;
  return FeatureRanking::from_scores(LinearModel::fit(train, Penalty::l2, options).importance());
}

FeatureRanking fit_lasso(const TabularDataset& train, std::size_t folds) {
  CvOptions options;
  options.folds = folds;
  return FeatureRanking::from_scores(LinearModel::fit(train, Penalty::l1, options).importance());
}

}  // namespace stabx::learners
