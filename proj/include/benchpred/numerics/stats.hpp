#pragma once

#include <Eigen/Dense>

namespace benchpred::numerics {

/// Sample Pearson correlation; throws "undefined-correlation" when either
/// input has zero variance.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

double mean(const Eigen::VectorXd& x);

/// Unbiased sample standard deviation (n-1 denominator).
double sample_sd(const Eigen::VectorXd& x);

}  // namespace benchpred::numerics
