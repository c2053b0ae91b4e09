#include "benchpred/numerics/ridge.hpp"

#include <cmath>

#include "benchpred/error.hpp"

namespace benchpred::numerics {

namespace {

struct Standardized {
  Eigen::MatrixXd x;       // centered/scaled copy, zero-variance columns zeroed
  Eigen::VectorXd mu;      // column means
  Eigen::VectorXd scale;   // column sds; 0 marks a dropped column
};

Standardized standardize(const Eigen::MatrixXd& features) {
  const auto rows = features.rows();
  const auto cols = features.cols();
  Standardized s;
  s.x = features;
  s.mu = features.colwise().mean();
  s.scale.resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    s.x.col(j).array() -= s.mu(j);
    const double sd = std::sqrt(s.x.col(j).squaredNorm() / static_cast<double>(rows));
    s.scale(j) = sd;
    if (sd > 0.0) {
      s.x.col(j) /= sd;
    } else {
      s.x.col(j).setZero();
    }
  }
  return s;
}

void check_inputs(const Eigen::MatrixXd& features, Eigen::Index label_rows,
                  double lambda) {
  if (features.rows() < 1 || features.cols() < 1) {
    throw Error("empty-design", "ridge needs at least one row and one feature");
  }
  if (features.rows() != label_rows) {
    throw Error("length-mismatch", "feature rows != label rows");
  }
  if (lambda < 0.0) throw Error("invalid-lambda", "lambda must be >= 0");
  if (!features.allFinite()) throw Error("non-finite", "features contain non-finite values");
}

// Solves (X~'X~ + lambda I) W = X~'Y for standardized X~, multiple RHS.
Eigen::MatrixXd solve_gram(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& rhs,
                           double lambda) {
  const auto k = xs.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(xs.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  if (lambda == 0.0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    lu.setThreshold(1e-10);
    if (lu.rank() < k) {
      throw Error("singular-system", "rank-deficient design with lambda = 0");
    }
    return lu.solve(rhs);
  }
  gram.diagonal().array() += lambda;
  return Eigen::LLT<Eigen::MatrixXd>(gram).solve(rhs);
}

}  // namespace

RidgeModel ridge_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                     double lambda) {
  check_inputs(features, labels.size(), lambda);
  const Standardized s = standardize(features);
  const double ybar = labels.mean();
  const Eigen::VectorXd yc = labels.array() - ybar;
  const Eigen::VectorXd ws = solve_gram(s.x, s.x.transpose() * yc, lambda);

  RidgeModel model;
  model.lambda = lambda;
  model.weights = Eigen::VectorXd::Zero(features.cols());
  model.intercept = ybar;
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    if (s.scale(j) > 0.0) {
      model.weights(j) = ws(j) / s.scale(j);
      model.intercept -= ws(j) * s.mu(j) / s.scale(j);
    }
  }
  return model;
}

MultiRidgeModel ridge_fit_multi(const Eigen::MatrixXd& features,
                                const Eigen::MatrixXd& labels, double lambda) {
  check_inputs(features, labels.rows(), lambda);
  const Standardized s = standardize(features);
  const Eigen::RowVectorXd ybar = labels.colwise().mean();
  const Eigen::MatrixXd yc = labels.rowwise() - ybar;
  const Eigen::MatrixXd ws = solve_gram(s.x, s.x.transpose() * yc, lambda);

  MultiRidgeModel model;
  model.lambda = lambda;
  model.weights = Eigen::MatrixXd::Zero(features.cols(), labels.cols());
  model.intercepts = ybar;
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    if (s.scale(j) > 0.0) {
      model.weights.row(j) = ws.row(j) / s.scale(j);
      model.intercepts -= ws.row(j) * (s.mu(j) / s.scale(j));
    }
  }
  return model;
}

}  // namespace benchpred::numerics
