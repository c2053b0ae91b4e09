#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace benchpred {

/// Dense per-datapoint performance matrix: rows are models, columns are
/// benchmark data points, entries lie in [0, 1]. Immutable after validation;
/// row/column ids are I/O metadata only, all access is positional.
struct ScoreMatrix {
  std::vector<std::string> model_ids;
  std::vector<std::string> datapoint_ids;
  Eigen::MatrixXd scores;
  bool binary_flag = false;

  Eigen::Index models() const { return scores.rows(); }
  Eigen::Index datapoints() const { return scores.cols(); }
};

/// Disjoint source/target row index sets defining one experiment condition.
struct ModelSplit {
  std::vector<int> source_rows;
  std::vector<int> target_rows;
};

/// Ordered subset of distinct column indices, optionally weighted.
/// Weights, when present, align with indices and sum to 1.
struct CoreSet {
  std::vector<int> indices;
  std::optional<std::vector<double>> weights;

  int size() const { return static_cast<int>(indices.size()); }
};

enum class MethodId {
  random_sampling,
  random_sampling_learn,
  random_search_learn,
  lasso,
  double_optimize,
  anchor_points_weighted,
  anchor_points_predictor,
  p_irt,
  gp_irt,
  pca,
  aipw,
};

constexpr int kMethodCount = 11;

const std::vector<MethodId>& all_methods();
std::string method_name(MethodId id);
MethodId method_from_name(const std::string& name);

/// Predicted full-benchmark mean for one target model.
struct Estimate {
  double value = 0.0;
  MethodId method_id = MethodId::random_sampling;
  bool clamped = false;
};

struct ValidationIssue {
  std::string kind;    // "out-of-range", "non-finite", "duplicate-model-id", ...
  std::string detail;  // human-readable location
};

using ValidationReport = std::vector<ValidationIssue>;

/// Collects every invariant violation; an empty report means the matrix is
/// accepted. Also recomputes binary_flag consistency.
ValidationReport validate(const ScoreMatrix& matrix);

/// True iff every entry is exactly 0 or 1.
bool all_binary(const Eigen::MatrixXd& scores);

/// Arithmetic mean of row `row` over the columns in `cols`.
double mean_score(const ScoreMatrix& matrix, int row, const std::vector<int>& cols);

/// Row entries at the core-set columns, in core order.
Eigen::VectorXd slice_core(const ScoreMatrix& matrix, int row, const CoreSet& core);
Eigen::VectorXd slice_core(const Eigen::MatrixXd& scores, int row,
                           const std::vector<int>& cols);

/// CoreSet helpers shared by the estimators.
CoreSet make_core(std::vector<int> indices);
CoreSet make_weighted_core(std::vector<int> indices, std::vector<double> weights);
void check_core(const CoreSet& core, Eigen::Index n_cols);

}  // namespace benchpred
