#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stabx/core/dataset.hpp"
#include "stabx/core/types.hpp"
#include "stabx/learners/predictor.hpp"

namespace stabx::learners {

enum class Penalty { l1, l2 };

std::string_view to_string(Penalty penalty);

struct LinearModelFit {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double lambda = 0.0;
  Penalty penalty = Penalty::l2;
};

struct LassoOptions {
  std::size_t max_sweeps = 10000;
  // Convergence when the duality gap falls below tol * ||y||^2.
  double tol = 1e-4;
};

// Ridge: minimizes ||y - X b||^2 + lambda ||b||^2.
LinearModelFit ridge_fixed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           double lambda, bool fit_intercept);

// Lasso: minimizes (1/2N) ||y - X b||^2 + lambda ||b||_1 by cyclic coordinate
// descent. `warm_start` may hold a starting coefficient vector. Throws
// ConvergenceError with the final duality gap after max_sweeps.
LinearModelFit lasso_fixed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           double lambda, bool fit_intercept,
                           const LassoOptions& options = {},
                           const Eigen::VectorXd* warm_start = nullptr);

// Smallest lambda at which the lasso solution is zero: ||X^T y||_inf / N
// (after centering when fitting an intercept).
double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        bool fit_intercept);

// Upper end of the ridge grid: 100 times the mean squared column norm.
double ridge_lambda_max(const Eigen::MatrixXd& x, bool fit_intercept);

// `count` log-spaced values from lambda_max down to ratio * lambda_max,
// largest first.
std::vector<double> lambda_grid(double lambda_max, std::size_t count = 50,
                                double ratio = 1e-4);

struct CvOptions {
  std::size_t folds = 5;
  std::size_t grid_size = 50;
  double grid_ratio = 1e-4;
  bool fit_intercept = true;
  LassoOptions lasso;
};

// Selects lambda on the grid by minimum mean validation MSE over contiguous
// folds (ties go to the larger lambda) and refits on all rows.
LinearModelFit fit_cv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      Penalty penalty, const CvOptions& options = {});

// Penalized linear model on a dataset. Regression fits one model; a
// classification target with C classes fits C one-vs-rest least-squares
// models on 0/1 indicators and predicts the class with the largest score.
class LinearModel : public Predictor {
 public:
  static LinearModel fit(const TabularDataset& train, Penalty penalty,
                         const CvOptions& options = {});

  Eigen::VectorXd predict(const Eigen::MatrixXd& features) const override;
  bool is_classifier() const override { return classifier_; }

  const std::vector<LinearModelFit>& fits() const { return fits_; }
  // Mean absolute coefficient over the per-class fits.
  std::vector<double> importance() const;

 private:
  std::vector<LinearModelFit> fits_;
  bool classifier_ = false;
};

FeatureRanking fit_ridge(const TabularDataset& train, std::size_t folds = 5);
FeatureRanking fit_lasso(const TabularDataset& train, std::size_t folds = 5);

}  // namespace stabx::learners
