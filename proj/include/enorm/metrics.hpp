#pragma once

#include <Eigen/Core>

#include "enorm/errors.hpp"

namespace enorm {

// 1 - SS_res/SS_tot with SS_tot about the mean of y_true. At most 1, negative
// when the predictions are worse than the mean predictor. Undefined (throws)
// for constant y_true.
template <typename DerivedT, typename DerivedP>
double r_squared(const Eigen::MatrixBase<DerivedT>& y_true,
                 const Eigen::MatrixBase<DerivedP>& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw ValidationError("r_squared: length mismatch");
  }
  if (y_true.size() < 2) {
    throw ValidationError("r_squared: need at least 2 values");
  }
  const double mean = y_true.mean();
  const double ss_tot = (y_true.array() - mean).square().sum();
  if (ss_tot == 0.0) {
    throw ValidationError("r_squared: y_true is constant, R^2 undefined");
  }
  const double ss_res = (y_true - y_pred).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

template <typename DerivedT, typename DerivedP>
double mse(const Eigen::MatrixBase<DerivedT>& y_true,
           const Eigen::MatrixBase<DerivedP>& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw ValidationError("mse: length mismatch");
  }
  if (y_true.size() < 1) {
    throw ValidationError("mse: empty input");
  }
  return (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size());
}

}  // namespace enorm
