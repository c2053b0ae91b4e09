#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace benchpred::numerics {

/// Two-parameter logistic model: P(correct) = sigmoid(a_z * theta_f - b_z).
struct IrtModel {
  Eigen::VectorXd difficulties;     // b_z, one per item
  Eigen::VectorXd discriminations;  // a_z > 0, one per item
  Eigen::VectorXd abilities;        // theta_f, one per fitted (source) model
  double log_posterior = 0.0;
  int epochs = 0;
  bool converged = false;
  std::vector<double> posterior_trace;  // value after each epoch

  double probability(double ability, int item) const;

  /// Mean predicted probability over the given items for one ability.
  double mean_probability(double ability, const std::vector<int>& items) const;
};

struct IrtConfig {
  int max_epochs = 500;
  double tol = 1e-6;                // minimum log-posterior gain per epoch
  double ability_prior_sd = 1.0;    // theta ~ N(0, 1)
  double difficulty_prior_sd = 1.0; // b ~ N(0, 1)
  double log_disc_prior_sd = 0.5;   // log a ~ N(0, 0.25)
  std::uint64_t seed = 0;           // reserved; the default init is deterministic
};

/// MAP fit of the 2PL model on a binary matrix (rows = models, cols = items)
/// by alternating penalized updates: item parameters then abilities, each a
/// curvature-scaled gradient step with step-halving so the log posterior never
/// decreases. Stops when an epoch improves the posterior by less than tol.
IrtModel irt_fit(const Eigen::MatrixXd& binary_scores, const IrtConfig& config = {});

/// MAP ability for a new response vector under fixed item parameters
/// (N(0,1) prior), via damped 1-D Newton iterations to |step| < 1e-8.
/// `items` selects the columns of `model` the responses align with.
double irt_ability(const IrtModel& model, const std::vector<int>& items,
                   const Eigen::VectorXd& responses);

}  // namespace benchpred::numerics
