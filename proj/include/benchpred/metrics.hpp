#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace benchpred {

/// Per-target bookkeeping for one estimate: absolute gap plus the
/// sigma-normalized gap used by the similarity analysis. sigma_f is the
/// Bernoulli scale sqrt(p(1-p)) of the target's true mean; the normalized gap
/// is undefined (and flagged) when sigma_f = 0.
struct GapRecord {
  std::string target_model;
  double true_mean = 0.0;
  double estimate = 0.0;
  double gap = 0.0;
  double sigma_f = 0.0;
  double normalized_gap = 0.0;
  bool normalized_defined = false;
};

GapRecord make_gap_record(std::string target_model, double true_mean, double estimate);

/// Chance-corrected agreement of one target model with the source models.
struct SimilarityRecord {
  std::string target_model;
  double similarity = 0.0;              // mean component over sources
  std::vector<double> components;       // per source: (c_obs - c_exp)/(1 - c_exp)
  bool degenerate = false;              // some source hit the c_exp = 1 case
};

/// Mean absolute difference between true and estimated full-benchmark means.
double estimation_gap(const Eigen::VectorXd& true_means, const Eigen::VectorXd& estimates);

/// Percent change of a method's estimation gap against a baseline;
/// negative means improvement.
double gap_reduction(double method_eg, double baseline_eg);

/// Chance-corrected agreement between a 0/1 target row and every source row:
/// per source, c_obs is the observed agreement rate and c_exp the agreement
/// expected from two independent models with the same accuracies. When
/// c_exp = 1 (both models constant with equal accuracy 0 or 1) the component
/// is 1 if the agreement is total and 0 otherwise, and the record is flagged.
SimilarityRecord model_similarity(const Eigen::VectorXd& target_row,
                                  const Eigen::MatrixXd& source_matrix,
                                  std::string target_model = {});

/// Single agreement component between two 0/1 rows; symmetric in its inputs.
double similarity_component(const Eigen::VectorXd& row_a, const Eigen::VectorXd& row_b,
                            bool* degenerate = nullptr);

/// Pearson correlation over (similarity, normalized gap) pairs.
double similarity_gap_correlation(const std::vector<double>& similarities,
                                  const std::vector<double>& normalized_gaps);

}  // namespace benchpred
