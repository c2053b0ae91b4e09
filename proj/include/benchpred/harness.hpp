#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "benchpred/estimators.hpp"
#include "benchpred/ingest.hpp"
#include "benchpred/report.hpp"
#include "benchpred/score_matrix.hpp"
#include "benchpred/synth.hpp"

namespace benchpred {

enum class SplitKind { interpolation, extrapolation };

struct SplitSpec {
  SplitKind kind = SplitKind::interpolation;
  double source_fraction = 0.75;  // interpolation
  double bottom_fraction = 0.50;  // extrapolation sources
  double top_fraction = 0.30;     // extrapolation targets
};

/// Where a benchmark came from; kept alongside the loaded bundle so the
/// effective config can be embedded in reports.
struct BenchmarkSource {
  std::string name;
  std::string csv_path;             // empty for synthetic benchmarks
  std::optional<SynthSpec> synth;
};

struct ExperimentConfig {
  std::vector<BenchmarkSource> sources;
  std::vector<BenchmarkBundle> benchmarks;  // aligned with sources
  std::vector<MethodConfig> methods;
  int n = 50;
  int trials = 100;
  SplitSpec split;
  std::uint64_t base_seed = 0;
  bool clamp = false;
  int jobs = 1;
};

/// Uniform random partition with |source| = round(fraction * M).
/// Deterministic given seed; both index sets come back sorted.
ModelSplit make_interpolation_split(const ScoreMatrix& matrix, double fraction,
                                    std::uint64_t seed);

struct ExtrapolationSplit {
  ModelSplit split;
  bool degenerate_ranking = false;  // a mean tie crossed a cut boundary
};

/// Ranks models by full-benchmark mean (ties by row index): the bottom
/// floor(bottom*M) rows become sources, the top floor(top*M) targets, the
/// middle band is excluded. No randomness.
ExtrapolationSplit make_extrapolation_split(const ScoreMatrix& matrix,
                                            double bottom = 0.50, double top = 0.30);

using ProgressFn = std::function<void(const std::string& line)>;

/// Runs every (benchmark, method, trial) cell. Within one (benchmark, trial)
/// all methods see the same split, and every method that samples a uniform
/// random core set receives the same one. Interpolation resamples the split
/// per trial; extrapolation keeps the split fixed and only the core-set /
/// estimator randomness varies. Cells run on `config.jobs` threads; results
/// are ordered and bit-identical regardless of scheduling.
std::vector<TrialReport> run_experiment(const ExperimentConfig& config,
                                        const ProgressFn& progress = {});

/// Per-(benchmark, method) table: mean EG over trials with its standard
/// error, reduction vs the random-sampling cell of the same benchmark, and
/// the pooled similarity/normalized-gap correlation; plus cross-benchmark
/// method averages.
ExperimentSummary aggregate(const std::vector<TrialReport>& trials);

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& benchmark, int trial);

}  // namespace benchpred
