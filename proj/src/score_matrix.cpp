#include "benchpred/score_matrix.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "benchpred/error.hpp"

namespace benchpred {

const std::vector<MethodId>& all_methods() {
  static const std::vector<MethodId> ids = {
      MethodId::random_sampling,     MethodId::random_sampling_learn,
      MethodId::random_search_learn, MethodId::lasso,
      MethodId::double_optimize,     MethodId::anchor_points_weighted,
      MethodId::anchor_points_predictor,
      MethodId::p_irt,               MethodId::gp_irt,
      MethodId::pca,                 MethodId::aipw,
  };
  return ids;
}

std::string method_name(MethodId id) {
  switch (id) {
    case MethodId::random_sampling: return "random-sampling";
    case MethodId::random_sampling_learn: return "random-sampling-learn";
    case MethodId::random_search_learn: return "random-search-learn";
    case MethodId::lasso: return "lasso";
    case MethodId::double_optimize: return "double-optimize";
    case MethodId::anchor_points_weighted: return "anchor-points-weighted";
    case MethodId::anchor_points_predictor: return "anchor-points-predictor";
    case MethodId::p_irt: return "p-irt";
    case MethodId::gp_irt: return "gp-irt";
    case MethodId::pca: return "pca";
    case MethodId::aipw: return "aipw";
  }
  throw Error("unknown-method", "unrecognized method id");
}

MethodId method_from_name(const std::string& name) {
  static const std::unordered_map<std::string, MethodId> lut = [] {
    std::unordered_map<std::string, MethodId> m;
    for (const MethodId id : all_methods()) m.emplace(method_name(id), id);
    return m;
  }();
  const auto it = lut.find(name);
  if (it == lut.end()) {
    throw config_error("unknown-method", "unrecognized method name: " + name);
  }
  return it->second;
}

bool all_binary(const Eigen::MatrixXd& scores) {
  return ((scores.array() == 0.0) || (scores.array() == 1.0)).all();
}

ValidationReport validate(const ScoreMatrix& matrix) {
  ValidationReport report;
  const auto rows = matrix.scores.rows();
  const auto cols = matrix.scores.cols();

  if (cols < 1) report.push_back({"empty-matrix", "matrix has no data points"});
  if (rows < 2) report.push_back({"too-few-models", "matrix needs at least 2 models"});

  if (static_cast<Eigen::Index>(matrix.model_ids.size()) != rows) {
    report.push_back({"id-count-mismatch", "model_ids size != row count"});
  }
  if (static_cast<Eigen::Index>(matrix.datapoint_ids.size()) != cols) {
    report.push_back({"id-count-mismatch", "datapoint_ids size != column count"});
  }

  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double v = matrix.scores(i, j);
      if (!std::isfinite(v)) {
        report.push_back({"non-finite",
                          "entry (" + std::to_string(i) + "," + std::to_string(j) + ")"});
      } else if (v < 0.0 || v > 1.0) {
        report.push_back({"out-of-range",
                          "entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") = " + std::to_string(v)});
      }
    }
  }

  std::unordered_set<std::string> seen;
  for (const auto& id : matrix.model_ids) {
    if (!seen.insert(id).second) {
      report.push_back({"duplicate-model-id", id});
    }
  }
  seen.clear();
  for (const auto& id : matrix.datapoint_ids) {
    if (!seen.insert(id).second) {
      report.push_back({"duplicate-datapoint-id", id});
    }
  }

  if (rows > 0 && cols > 0 && matrix.binary_flag != all_binary(matrix.scores)) {
    report.push_back({"binary-flag-mismatch",
                      matrix.binary_flag ? "flag set but non-binary entries present"
                                         : "flag unset but all entries are 0/1"});
  }
  return report;
}

namespace {

void check_row(const ScoreMatrix& matrix, int row) {
  if (row < 0 || row >= matrix.models()) {
    throw Error("index-out-of-range", "model row " + std::to_string(row));
  }
}

void check_col(Eigen::Index n_cols, int col) {
  if (col < 0 || col >= n_cols) {
    throw Error("index-out-of-range", "data-point column " + std::to_string(col));
  }
}

}  // namespace

double mean_score(const ScoreMatrix& matrix, int row, const std::vector<int>& cols) {
  check_row(matrix, row);
  if (cols.empty()) throw Error("empty-subset", "mean over empty column set");
  double sum = 0.0;
  for (const int c : cols) {
    check_col(matrix.datapoints(), c);
    sum += matrix.scores(row, c);
  }
  return sum / static_cast<double>(cols.size());
}

Eigen::VectorXd slice_core(const Eigen::MatrixXd& scores, int row,
                           const std::vector<int>& cols) {
  if (row < 0 || row >= scores.rows()) {
    throw Error("index-out-of-range", "model row " + std::to_string(row));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    check_col(scores.cols(), cols[i]);
    out(static_cast<Eigen::Index>(i)) = scores(row, cols[i]);
  }
  return out;
}

Eigen::VectorXd slice_core(const ScoreMatrix& matrix, int row, const CoreSet& core) {
  return slice_core(matrix.scores, row, core.indices);
}

CoreSet make_core(std::vector<int> indices) {
  CoreSet core;
  core.indices = std::move(indices);
  return core;
}

CoreSet make_weighted_core(std::vector<int> indices, std::vector<double> weights) {
  if (indices.size() != weights.size()) {
    throw Error("core-weight-mismatch", "weights must align with indices");
  }
  double sum = 0.0;
  for (const double w : weights) {
    if (w < 0.0) throw Error("negative-weight", "core weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error("unnormalized-weights", "core weights must sum to 1");
  }
  CoreSet core;
  core.indices = std::move(indices);
  core.weights = std::move(weights);
  return core;
}

void check_core(const CoreSet& core, Eigen::Index n_cols) {
  if (core.indices.empty()) throw Error("empty-subset", "core set is empty");
  if (static_cast<Eigen::Index>(core.indices.size()) > n_cols) {
    throw Error("budget-exceeds-dataset", "core set larger than the dataset");
  }
  std::unordered_set<int> seen;
  for (const int c : core.indices) {
    check_col(n_cols, c);
    if (!seen.insert(c).second) {
      throw Error("duplicate-core-index", "duplicate core column " + std::to_string(c));
    }
  }
}

}  // namespace benchpred
