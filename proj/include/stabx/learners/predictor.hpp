#pragma once

#include <Eigen/Dense>

namespace stabx::learners {

// A fitted model that maps rows of a feature matrix to predictions: class
// codes for classifiers, real values for regressors.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Eigen::VectorXd predict(const Eigen::MatrixXd& features) const = 0;
  virtual bool is_classifier() const = 0;
};

}  // namespace stabx::learners
