#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace benchpred::numerics {

/// Hard top-n selection: exactly n ones at the n largest logits, ties broken
/// by lowest index first.
Eigen::VectorXd topmask(const Eigen::VectorXd& logits, int n);

/// Indices selected by topmask, in ascending index order.
std::vector<int> topmask_indices(const Eigen::VectorXd& logits, int n);

struct MaskedLinearModel {
  Eigen::VectorXd selection_logits;  // pi over all columns
  Eigen::VectorXd weights;           // theta over all columns
  int n = 0;
  double final_loss = 0.0;           // hard-masked MSE at the returned parameters

  std::vector<int> mask() const { return topmask_indices(selection_logits, n); }
};

struct MaskedLinearConfig {
  int steps = 2000;
  double learning_rate = 0.01;
  double pi_init_sd = 0.1;
};

/// Joint gradient descent on (pi, theta) minimizing the mean squared error of
/// [x . topmask(pi; n)]' theta against the targets. The forward pass always
/// uses the hard mask; the backward pass passes the mask gradient straight
/// through to pi. Deterministic given seed.
MaskedLinearModel masked_linear_fit(const Eigen::MatrixXd& features,
                                    const Eigen::VectorXd& targets, int n,
                                    std::uint64_t seed,
                                    const MaskedLinearConfig& config = {});

/// Hard-masked MSE of a model on (features, targets); the quantity the fit
/// minimizes, exposed so callers can audit the forward loss.
double masked_linear_loss(const MaskedLinearModel& model, const Eigen::MatrixXd& features,
                          const Eigen::VectorXd& targets);

}  // namespace benchpred::numerics
