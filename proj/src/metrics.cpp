#include "benchpred/metrics.hpp"

#include <cmath>

#include "benchpred/error.hpp"
#include "benchpred/numerics/stats.hpp"
#include "benchpred/score_matrix.hpp"

namespace benchpred {

GapRecord make_gap_record(std::string target_model, double true_mean, double estimate) {
  GapRecord r;
  r.target_model = std::move(target_model);
  r.true_mean = true_mean;
  r.estimate = estimate;
  r.gap = std::abs(true_mean - estimate);
  r.sigma_f = std::sqrt(std::max(0.0, true_mean * (1.0 - true_mean)));
  if (r.sigma_f > 0.0) {
    r.normalized_gap = r.gap / r.sigma_f;
    r.normalized_defined = true;
  }
  return r;
}

double estimation_gap(const Eigen::VectorXd& true_means, const Eigen::VectorXd& estimates) {
  if (true_means.size() != estimates.size()) {
    throw Error("length-mismatch", "true means and estimates must align");
  }
  if (true_means.size() == 0) throw Error("empty-subset", "no target models");
  return (true_means - estimates).cwiseAbs().mean();
}

double gap_reduction(double method_eg, double baseline_eg) {
  if (baseline_eg <= 0.0) {
    throw Error("undefined-reduction", "baseline estimation gap must be positive");
  }
  return 100.0 * (method_eg - baseline_eg) / baseline_eg;
}

namespace {

void require_binary_vector(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != 0.0 && v(i) != 1.0) {
      throw Error("requires-binary", "similarity needs 0/1 scores");
    }
  }
}

}  // namespace

double similarity_component(const Eigen::VectorXd& row_a, const Eigen::VectorXd& row_b,
                            bool* degenerate) {
  if (row_a.size() != row_b.size() || row_a.size() == 0) {
    throw Error("length-mismatch", "rows must have equal nonzero length");
  }
  require_binary_vector(row_a);
  require_binary_vector(row_b);
  const double n = static_cast<double>(row_a.size());
  const double p = row_a.mean();
  const double q = row_b.mean();
  const double c_obs = (row_a.array() == row_b.array()).cast<double>().sum() / n;
  const double c_exp = p * q + (1.0 - p) * (1.0 - q);
  if (c_exp >= 1.0) {
    if (degenerate != nullptr) *degenerate = true;
    return c_obs == 1.0 ? 1.0 : 0.0;
  }
  return (c_obs - c_exp) / (1.0 - c_exp);
}

SimilarityRecord model_similarity(const Eigen::VectorXd& target_row,
                                  const Eigen::MatrixXd& source_matrix,
                                  std::string target_model) {
  if (source_matrix.rows() < 1) throw Error("empty-subset", "no source models");
  if (source_matrix.cols() != target_row.size()) {
    throw Error("length-mismatch", "target row must span the same data points");
  }
  SimilarityRecord record;
  record.target_model = std::move(target_model);
  record.components.reserve(static_cast<std::size_t>(source_matrix.rows()));
  double sum = 0.0;
  for (Eigen::Index f = 0; f < source_matrix.rows(); ++f) {
    bool degenerate = false;
    const double c = similarity_component(target_row, source_matrix.row(f).transpose(),
                                          &degenerate);
    record.degenerate = record.degenerate || degenerate;
    record.components.push_back(c);
    sum += c;
  }
  record.similarity = sum / static_cast<double>(source_matrix.rows());
  return record;
}

double similarity_gap_correlation(const std::vector<double>& similarities,
                                  const std::vector<double>& normalized_gaps) {
  if (similarities.size() != normalized_gaps.size()) {
    throw Error("length-mismatch", "pair lists must align");
  }
  if (similarities.size() < 2) {
    throw Error("too-few-samples", "correlation needs >= 2 records");
  }
  const Eigen::Map<const Eigen::VectorXd> s(similarities.data(),
                                            static_cast<Eigen::Index>(similarities.size()));
  const Eigen::Map<const Eigen::VectorXd> g(normalized_gaps.data(),
                                            static_cast<Eigen::Index>(normalized_gaps.size()));
  return numerics::pearson(s, g);
}

}  // namespace benchpred
