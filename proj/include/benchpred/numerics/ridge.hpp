#pragma once

#include <Eigen/Dense>

namespace benchpred::numerics {

/// Ridge regression with an unpenalized intercept. Features are standardized
/// to zero mean / unit variance over the training rows internally; the stored
/// weights are mapped back to the original feature space, so predict() works
/// on raw inputs. Constant (zero-variance) features receive weight 0.
struct RidgeModel {
  Eigen::VectorXd weights;  // one per feature, original scale
  double intercept = 0.0;
  double lambda = 0.0;

  double predict(const Eigen::VectorXd& features) const {
    return weights.dot(features) + intercept;
  }
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& features) const {
    return (features * weights).array() + intercept;
  }
};

/// Exact minimizer (normal equations) of
///   sum_r (y_r - w.x~_r - b)^2 + lambda * |w|^2
/// over standardized features x~. lambda = 0 on a rank-deficient system
/// throws "singular-system".
RidgeModel ridge_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                     double lambda);

/// Multi-output variant sharing one factorization: column t of `labels` is an
/// independent ridge problem with the same features and lambda.
struct MultiRidgeModel {
  Eigen::MatrixXd weights;    // features x outputs
  Eigen::RowVectorXd intercepts;
  double lambda = 0.0;

  Eigen::VectorXd predict(const Eigen::VectorXd& features) const {
    return (weights.transpose() * features) + intercepts.transpose();
  }
};

MultiRidgeModel ridge_fit_multi(const Eigen::MatrixXd& features,
                                const Eigen::MatrixXd& labels, double lambda);

}  // namespace benchpred::numerics
