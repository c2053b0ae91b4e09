#pragma once

#include <Eigen/Dense>

#include <vector>

namespace benchpred::numerics {

struct LassoModel {
  Eigen::VectorXd weights;   // over all columns; exact zeros outside support
  double intercept = 0.0;
  double lambda = 0.0;
  std::vector<int> support;  // indices of nonzero weights, ascending

  /// Support sizes observed along the lambda path, largest lambda first.
  std::vector<int> path_support_sizes;

  double predict(const Eigen::VectorXd& features) const {
    return weights.dot(features) + intercept;
  }
};

struct LassoConfig {
  int path_length = 100;
  double path_min_ratio = 1e-3;  // smallest lambda = ratio * lambda_max
  int max_sweeps = 1000;
  double tol = 1e-7;             // max coordinate change per sweep
};

/// Coordinate-descent lasso of
///   (1/2R) |y - X theta - b|^2 + lambda |theta|_1
/// solved along a decreasing geometric lambda path starting at lambda_max
/// (the all-zero solution). Returns the model at the smallest lambda whose
/// support size is <= max_support; the path stops once the support first
/// exceeds the budget. Coordinates sweep in ascending index order, so ties
/// resolve lowest-index-first.
LassoModel lasso_select(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                        int max_support, const LassoConfig& config = {});

}  // namespace benchpred::numerics
