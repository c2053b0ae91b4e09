#include "benchpred/numerics/lasso.hpp"

#include <algorithm>
#include <cmath>

#include "benchpred/error.hpp"

namespace benchpred::numerics {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// One coordinate-descent sweep over `order`; returns max |theta_j change|.
double sweep(const Eigen::MatrixXd& xc, const Eigen::VectorXd& col_sq,
             Eigen::VectorXd& theta, Eigen::VectorXd& residual, double lambda,
             double inv_rows, const std::vector<int>& order) {
  double max_delta = 0.0;
  for (const int j : order) {
    if (col_sq(j) == 0.0) continue;
    const double old = theta(j);
    const double rho = xc.col(j).dot(residual) * inv_rows + col_sq(j) * old;
    const double updated = soft_threshold(rho, lambda) / col_sq(j);
    if (updated != old) {
      residual -= xc.col(j) * (updated - old);
      theta(j) = updated;
      max_delta = std::max(max_delta, std::abs(updated - old));
    }
  }
  return max_delta;
}

std::vector<int> support_of(const Eigen::VectorXd& theta) {
  std::vector<int> s;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    if (theta(j) != 0.0) s.push_back(static_cast<int>(j));
  }
  return s;
}

}  // namespace

LassoModel lasso_select(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                        int max_support, const LassoConfig& config) {
  const auto rows = features.rows();
  const auto cols = features.cols();
  if (rows < 2) throw Error("too-few-samples", "lasso needs >= 2 rows");
  if (max_support < 1) throw Error("invalid-budget", "max_support must be >= 1");
  if (rows != labels.size()) throw Error("length-mismatch", "feature rows != label rows");

  const Eigen::RowVectorXd mu = features.colwise().mean();
  const Eigen::MatrixXd xc = features.rowwise() - mu;
  const double ybar = labels.mean();
  const Eigen::VectorXd yc = labels.array() - ybar;
  const double inv_rows = 1.0 / static_cast<double>(rows);

  Eigen::VectorXd col_sq(cols);
  for (Eigen::Index j = 0; j < cols; ++j) col_sq(j) = xc.col(j).squaredNorm() * inv_rows;

  const double lambda_max = (xc.transpose() * yc).cwiseAbs().maxCoeff() * inv_rows;

  std::vector<int> full_order(static_cast<std::size_t>(cols));
  for (Eigen::Index j = 0; j < cols; ++j) full_order[static_cast<std::size_t>(j)] = static_cast<int>(j);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(cols);
  Eigen::VectorXd residual = yc;

  LassoModel best;
  bool have_best = false;
  auto record = [&](double lambda) {
    best.weights = theta;
    best.intercept = ybar - theta.dot(mu.transpose());
    best.lambda = lambda;
    best.support = support_of(theta);
    have_best = true;
  };

  // lambda_max itself gives the all-zero solution, support 0 <= budget.
  std::vector<int> path_sizes;
  if (lambda_max <= 0.0) {
    // Labels already centered to zero correlation with every column.
    record(0.0);
    best.path_support_sizes = {0};
    return best;
  }

  const double ratio = std::pow(config.path_min_ratio,
                                1.0 / static_cast<double>(config.path_length - 1));
  // nudge above lambda_max so the all-zero start is not lost to round-off
  double lambda = lambda_max * (1.0 + 1e-10);
  for (int step = 0; step < config.path_length; ++step) {
    for (int it = 0; it < config.max_sweeps; ++it) {
      // Full sweep, then cycle the active set until stable.
      if (sweep(xc, col_sq, theta, residual, lambda, inv_rows, full_order) < config.tol) break;
      const std::vector<int> active = support_of(theta);
      for (int inner = 0; inner < config.max_sweeps; ++inner) {
        if (sweep(xc, col_sq, theta, residual, lambda, inv_rows, active) < config.tol) break;
      }
    }
    const int nnz = static_cast<int>(support_of(theta).size());
    path_sizes.push_back(nnz);
    if (nnz > max_support) break;
    record(lambda);
    lambda *= ratio;
  }

  if (!have_best) throw Error("path-failure", "no lambda on the path met the budget");
  best.path_support_sizes = std::move(path_sizes);
  return best;
}

}  // namespace benchpred::numerics
