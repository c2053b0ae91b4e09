#include "benchpred/numerics/stats.hpp"

#include <cmath>

#include "benchpred/error.hpp"

namespace benchpred::numerics {

double mean(const Eigen::VectorXd& x) {
  if (x.size() == 0) throw Error("empty-subset", "mean of empty vector");
  return x.mean();
}

double sample_sd(const Eigen::VectorXd& x) {
  const auto n = x.size();
  if (n < 2) throw Error("too-few-samples", "sample sd needs >= 2 values");
  const double m = x.mean();
  return std::sqrt((x.array() - m).square().sum() / static_cast<double>(n - 1));
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw Error("length-mismatch", "pearson inputs must have equal length");
  }
  if (x.size() < 2) throw Error("too-few-samples", "pearson needs >= 2 pairs");
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx;
  const Eigen::ArrayXd dy = y.array() - my;
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  if (sxx == 0.0 || syy == 0.0) {
    throw Error("undefined-correlation", "zero-variance input");
  }
  return dx.cwiseProduct(dy).sum() / std::sqrt(sxx * syy);
}

}  // namespace benchpred::numerics
