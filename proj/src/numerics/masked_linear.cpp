#include "benchpred/numerics/masked_linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "benchpred/error.hpp"
#include "benchpred/rng.hpp"

namespace benchpred::numerics {

std::vector<int> topmask_indices(const Eigen::VectorXd& logits, int n) {
  const int total = static_cast<int>(logits.size());
  if (n < 0 || n > total) throw Error("invalid-budget", "mask size out of range");
  std::vector<int> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return logits(a) > logits(b); });
  order.resize(static_cast<std::size_t>(n));
  std::sort(order.begin(), order.end());
  return order;
}

Eigen::VectorXd topmask(const Eigen::VectorXd& logits, int n) {
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(logits.size());
  for (const int j : topmask_indices(logits, n)) mask(j) = 1.0;
  return mask;
}

double masked_linear_loss(const MaskedLinearModel& model, const Eigen::MatrixXd& features,
                          const Eigen::VectorXd& targets) {
  const Eigen::VectorXd mask = topmask(model.selection_logits, model.n);
  const Eigen::VectorXd masked_w = model.weights.cwiseProduct(mask);
  return (features * masked_w - targets).squaredNorm() /
         static_cast<double>(features.rows());
}

MaskedLinearModel masked_linear_fit(const Eigen::MatrixXd& features,
                                    const Eigen::VectorXd& targets, int n,
                                    std::uint64_t seed,
                                    const MaskedLinearConfig& config) {
  const auto rows = features.rows();
  const auto cols = features.cols();
  if (rows < 2) throw Error("too-few-samples", "need >= 2 training rows");
  if (n < 1 || n > cols) throw Error("invalid-budget", "mask size out of range");
  if (rows != targets.size()) throw Error("length-mismatch", "feature rows != target rows");

  Rng rng(seed);
  MaskedLinearModel model;
  model.n = n;
  model.selection_logits.resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    model.selection_logits(j) = rng.normal(0.0, config.pi_init_sd);
  }
  model.weights = Eigen::VectorXd::Constant(cols, 1.0 / static_cast<double>(n));

  const double scale = 2.0 / static_cast<double>(rows);
  for (int step = 0; step < config.steps; ++step) {
    const Eigen::VectorXd mask = topmask(model.selection_logits, n);
    const Eigen::VectorXd masked_w = model.weights.cwiseProduct(mask);
    const Eigen::VectorXd residual = features * masked_w - targets;
    const double loss = residual.squaredNorm() / static_cast<double>(rows);
    if (!std::isfinite(loss)) {
      throw Error("optimization-diverged", "loss became non-finite at step " +
                                               std::to_string(step));
    }
    const Eigen::VectorXd back = features.transpose() * residual * scale;
    // theta sees the hard mask; pi receives the mask gradient straight through
    const Eigen::VectorXd grad_theta = back.cwiseProduct(mask);
    const Eigen::VectorXd grad_pi = back.cwiseProduct(model.weights);
    model.weights -= config.learning_rate * grad_theta;
    model.selection_logits -= config.learning_rate * grad_pi;
  }

  model.final_loss = masked_linear_loss(model, features, targets);
  if (!std::isfinite(model.final_loss)) {
    throw Error("optimization-diverged", "final loss is non-finite");
  }
  return model;
}

}  // namespace benchpred::numerics
