#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "benchpred/score_matrix.hpp"

namespace benchpred {

/// One target model's row in a trial report. normalized_gap and similarity
/// are optional analyses: undefined when sigma_f = 0 or the benchmark is not
/// binary, respectively.
struct TargetRecord {
  std::string model;
  double true_mean = 0.0;
  double estimate = 0.0;
  double gap = 0.0;
  double sigma = 0.0;
  double normalized_gap = 0.0;
  bool normalized_defined = false;
  double similarity = 0.0;
  bool similarity_defined = false;
  bool similarity_degenerate = false;
};

/// One (benchmark, method, trial) cell. `seed` is the method-agnostic trial
/// seed, so every method in a trial shares the split and, where applicable,
/// the random core set. wall_ms is diagnostic only and never serialized.
struct TrialReport {
  std::string benchmark;
  MethodId method = MethodId::random_sampling;
  int trial = 0;
  std::uint64_t seed = 0;
  int n = 0;
  std::vector<int> core_set;
  std::string status = "ok";  // or "not-applicable"
  std::vector<TargetRecord> targets;
  double trial_eg = 0.0;      // mean absolute gap over targets
  double wall_ms = 0.0;
};

struct CellSummary {
  std::string benchmark;
  MethodId method = MethodId::random_sampling;
  std::string status = "ok";
  int trials = 0;
  double eg_mean = 0.0;
  double eg_sem = 0.0;
  double egr = 0.0;           // percent vs random-sampling; negative is better
  bool egr_defined = false;
  double similarity_gap_correlation = 0.0;
  bool correlation_defined = false;
};

struct MethodSummary {
  MethodId method = MethodId::random_sampling;
  int benchmarks = 0;
  double eg_mean = 0.0;       // average of per-benchmark EG means
  double egr_mean = 0.0;      // average of per-benchmark reductions
  bool egr_defined = false;
};

struct ExperimentSummary {
  std::vector<CellSummary> cells;
  std::vector<MethodSummary> methods;
};

/// Everything one `run` produces: the fully-resolved config (serialized JSON,
/// for provenance), the per-cell trial reports, and the aggregate table.
struct RunReport {
  std::string config_json;
  std::vector<TrialReport> trials;
  ExperimentSummary summary;
};

}  // namespace benchpred
