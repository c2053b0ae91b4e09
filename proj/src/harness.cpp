#include "benchpred/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "benchpred/error.hpp"
#include "benchpred/metrics.hpp"
#include "benchpred/numerics/stats.hpp"
#include "benchpred/rng.hpp"

namespace benchpred {

namespace {

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& benchmark, int trial) {
  return derive_seed(base_seed, benchmark, static_cast<std::uint64_t>(trial));
}

ModelSplit make_interpolation_split(const ScoreMatrix& matrix, double fraction,
                                    std::uint64_t seed) {
  const int m = static_cast<int>(matrix.models());
  if (m < 4) throw Error("split-too-small", "need at least 4 models to split");
  if (fraction <= 0.0 || fraction >= 1.0) {
    throw Error("invalid-fractions", "source fraction must lie in (0, 1)");
  }
  const int n_source = static_cast<int>(std::lround(fraction * static_cast<double>(m)));
  if (n_source < 1 || n_source > m - 1) {
    throw Error("split-too-small", "split leaves an empty side");
  }
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);
  ModelSplit split;
  split.source_rows.assign(order.begin(), order.begin() + n_source);
  split.target_rows.assign(order.begin() + n_source, order.end());
  split.source_rows = sorted(std::move(split.source_rows));
  split.target_rows = sorted(std::move(split.target_rows));
  return split;
}

ExtrapolationSplit make_extrapolation_split(const ScoreMatrix& matrix, double bottom,
                                            double top) {
  const int m = static_cast<int>(matrix.models());
  if (m < 10) throw Error("split-too-small", "need at least 10 models to rank-split");
  if (bottom <= 0.0 || bottom >= 1.0 || top <= 0.0 || top >= 1.0) {
    throw Error("invalid-fractions", "fractions must lie in (0, 1)");
  }
  if (bottom + top > 1.0 + 1e-12) {
    throw Error("invalid-fractions", "bottom and top fractions overlap");
  }
  const Eigen::VectorXd means = matrix.scores.rowwise().mean();
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return means(a) < means(b); });

  const int n_source = static_cast<int>(std::floor(bottom * static_cast<double>(m)));
  const int n_target = static_cast<int>(std::floor(top * static_cast<double>(m)));
  if (n_source < 1 || n_target < 1) {
    throw Error("split-too-small", "fractions leave an empty side");
  }

  ExtrapolationSplit result;
  result.split.source_rows =
      sorted({order.begin(), order.begin() + n_source});
  result.split.target_rows = sorted({order.end() - n_target, order.end()});
  const auto tie_at = [&](int upper_start) {
    return means(order[static_cast<std::size_t>(upper_start - 1)]) ==
           means(order[static_cast<std::size_t>(upper_start)]);
  };
  result.degenerate_ranking = tie_at(n_source) || tie_at(m - n_target);
  return result;
}

namespace {

struct TrialContext {
  ModelSplit split;
  std::vector<int> shared_core;
  Eigen::MatrixXd source_block;
  Eigen::VectorXd target_truths;
  std::vector<double> similarity;
  std::vector<char> similarity_degenerate;
  bool similarity_defined = false;
};

TrialContext build_context(const ExperimentConfig& config, const BenchmarkBundle& bundle,
                           std::uint64_t seed) {
  TrialContext ctx;
  const ScoreMatrix& matrix = bundle.matrix;
  if (config.split.kind == SplitKind::interpolation) {
    ctx.split = make_interpolation_split(matrix, config.split.source_fraction,
                                         derive_seed(seed, "split"));
  } else {
    ctx.split = make_extrapolation_split(matrix, config.split.bottom_fraction,
                                         config.split.top_fraction)
                    .split;
  }
  const int n_cols = static_cast<int>(matrix.datapoints());
  if (config.n > n_cols) {
    throw Error("budget-exceeds-dataset",
                "core budget exceeds " + bundle.name + "'s data points");
  }
  ctx.shared_core = Rng(derive_seed(seed, "core"))
                        .sample_without_replacement(n_cols, config.n);

  ctx.source_block.resize(static_cast<Eigen::Index>(ctx.split.source_rows.size()),
                          matrix.datapoints());
  for (std::size_t i = 0; i < ctx.split.source_rows.size(); ++i) {
    ctx.source_block.row(static_cast<Eigen::Index>(i)) =
        matrix.scores.row(ctx.split.source_rows[i]);
  }
  ctx.target_truths.resize(static_cast<Eigen::Index>(ctx.split.target_rows.size()));
  for (std::size_t i = 0; i < ctx.split.target_rows.size(); ++i) {
    ctx.target_truths(static_cast<Eigen::Index>(i)) =
        matrix.scores.row(ctx.split.target_rows[i]).mean();
  }

  ctx.similarity_defined = matrix.binary_flag;
  if (ctx.similarity_defined) {
    ctx.similarity.reserve(ctx.split.target_rows.size());
    ctx.similarity_degenerate.reserve(ctx.split.target_rows.size());
    for (const int row : ctx.split.target_rows) {
      const SimilarityRecord rec =
          model_similarity(matrix.scores.row(row).transpose(), ctx.source_block);
      ctx.similarity.push_back(rec.similarity);
      ctx.similarity_degenerate.push_back(rec.degenerate ? 1 : 0);
    }
  }
  return ctx;
}

TrialReport run_cell(const ExperimentConfig& config, const BenchmarkBundle& bundle,
                     const TrialContext& ctx, const MethodConfig& method, int trial,
                     std::uint64_t seed) {
  TrialReport report;
  report.benchmark = bundle.name;
  report.method = method.method_id;
  report.trial = trial;
  report.seed = seed;
  report.n = config.n;

  const bool binary = bundle.matrix.binary_flag;
  if (requires_binary(method.method_id) && !binary) {
    report.status = "not-applicable";
    return report;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<int>* shared =
      uses_random_core(method.method_id) ? &ctx.shared_core : nullptr;
  const EstimatorPtr estimator =
      fit_estimator(method, ctx.source_block, config.n,
                    derive_seed(seed, "fit", static_cast<std::uint64_t>(method.method_id)),
                    shared, binary);

  report.core_set = estimator->core_set().indices;
  report.targets.reserve(ctx.split.target_rows.size());
  double gap_sum = 0.0;
  for (std::size_t i = 0; i < ctx.split.target_rows.size(); ++i) {
    const int row = ctx.split.target_rows[i];
    const Eigen::VectorXd core_scores =
        slice_core(bundle.matrix.scores, row, report.core_set);
    Estimate est;
    est.method_id = method.method_id;
    est.value = estimator->estimate(core_scores);
    if (config.clamp) {
      est.value = std::clamp(est.value, 0.0, 1.0);
      est.clamped = true;
    }
    const GapRecord gap = make_gap_record(bundle.matrix.model_ids[static_cast<std::size_t>(row)],
                                          ctx.target_truths(static_cast<Eigen::Index>(i)),
                                          est.value);
    TargetRecord target;
    target.model = gap.target_model;
    target.true_mean = gap.true_mean;
    target.estimate = gap.estimate;
    target.gap = gap.gap;
    target.sigma = gap.sigma_f;
    target.normalized_gap = gap.normalized_gap;
    target.normalized_defined = gap.normalized_defined;
    if (ctx.similarity_defined) {
      target.similarity = ctx.similarity[i];
      target.similarity_defined = true;
      target.similarity_degenerate = ctx.similarity_degenerate[i] != 0;
    }
    gap_sum += gap.gap;
    report.targets.push_back(std::move(target));
  }
  report.trial_eg = gap_sum / static_cast<double>(report.targets.size());
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

}  // namespace

std::vector<TrialReport> run_experiment(const ExperimentConfig& config,
                                        const ProgressFn& progress) {
  if (config.benchmarks.empty()) throw config_error("no-benchmarks", "nothing to run");
  if (config.methods.empty()) throw config_error("no-methods", "nothing to run");
  if (config.trials < 1) throw config_error("invalid-trials", "trials must be >= 1");
  if (config.n < 1) throw config_error("invalid-budget", "core budget must be >= 1");
  {
    std::vector<std::string> names;
    for (const auto& b : config.benchmarks) names.push_back(b.name);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
      throw config_error("duplicate-benchmark", "benchmark names must be unique");
    }
  }

  const int n_bench = static_cast<int>(config.benchmarks.size());
  const int n_methods = static_cast<int>(config.methods.size());
  const int units = n_bench * config.trials;
  std::vector<TrialReport> reports(
      static_cast<std::size_t>(units) * static_cast<std::size_t>(n_methods));

  std::atomic<int> next_unit{0};
  std::mutex progress_mutex;
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const int unit = next_unit.fetch_add(1);
      if (unit >= units || failed.load()) break;
      const int bench_idx = unit / config.trials;
      const int trial = unit % config.trials;
      const BenchmarkBundle& bundle = config.benchmarks[static_cast<std::size_t>(bench_idx)];
      try {
        const std::uint64_t seed = trial_seed(config.base_seed, bundle.name, trial);
        const TrialContext ctx = build_context(config, bundle, seed);
        for (int mi = 0; mi < n_methods; ++mi) {
          TrialReport cell = run_cell(config, bundle, ctx,
                                      config.methods[static_cast<std::size_t>(mi)], trial,
                                      seed);
          if (progress) {
            std::lock_guard<std::mutex> lock(progress_mutex);
            progress("cell " + cell.benchmark + " " + method_name(cell.method) + " " +
                     std::to_string(trial) + " " + cell.status + " " +
                     std::to_string(cell.wall_ms) + "ms");
          }
          reports[static_cast<std::size_t>(unit) * static_cast<std::size_t>(n_methods) +
                  static_cast<std::size_t>(mi)] = std::move(cell);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        break;
      }
    }
  };

  const int jobs = std::max(1, std::min(config.jobs, units));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return reports;
}

namespace {

struct CellAccumulator {
  std::vector<double> trial_egs;
  std::vector<double> sims;
  std::vector<double> norm_gaps;
  int not_applicable = 0;
};

}  // namespace

ExperimentSummary aggregate(const std::vector<TrialReport>& trials) {
  if (trials.empty()) throw Error("empty-report", "no trial reports to aggregate");

  std::vector<std::pair<std::string, MethodId>> order;
  std::map<std::pair<std::string, int>, CellAccumulator> cells;
  for (const TrialReport& t : trials) {
    const auto key = std::make_pair(t.benchmark, static_cast<int>(t.method));
    if (cells.find(key) == cells.end()) order.push_back({t.benchmark, t.method});
    CellAccumulator& acc = cells[key];
    if (t.status != "ok") {
      ++acc.not_applicable;
      continue;
    }
    acc.trial_egs.push_back(t.trial_eg);
    for (const TargetRecord& target : t.targets) {
      if (target.similarity_defined && target.normalized_defined) {
        acc.sims.push_back(target.similarity);
        acc.norm_gaps.push_back(target.normalized_gap);
      }
    }
  }

  // keep report order: benchmark-major, then method order of first appearance
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    return a.first < b.first;
  });

  ExperimentSummary summary;
  std::map<std::string, double> baseline_eg;
  for (const auto& [bench, method] : order) {
    const CellAccumulator& acc = cells.at({bench, static_cast<int>(method)});
    if (method == MethodId::random_sampling && !acc.trial_egs.empty()) {
      double sum = 0.0;
      for (const double eg : acc.trial_egs) sum += eg;
      baseline_eg[bench] = sum / static_cast<double>(acc.trial_egs.size());
    }
  }

  for (const auto& [bench, method] : order) {
    const CellAccumulator& acc = cells.at({bench, static_cast<int>(method)});
    CellSummary cell;
    cell.benchmark = bench;
    cell.method = method;
    cell.trials = static_cast<int>(acc.trial_egs.size());
    if (acc.trial_egs.empty()) {
      cell.status = "not-applicable";
      summary.cells.push_back(std::move(cell));
      continue;
    }
    const Eigen::Map<const Eigen::VectorXd> egs(
        acc.trial_egs.data(), static_cast<Eigen::Index>(acc.trial_egs.size()));
    cell.eg_mean = egs.mean();
    cell.eg_sem = acc.trial_egs.size() > 1
                      ? numerics::sample_sd(egs) /
                            std::sqrt(static_cast<double>(acc.trial_egs.size()))
                      : 0.0;
    const auto base = baseline_eg.find(bench);
    if (base != baseline_eg.end() && base->second > 0.0) {
      cell.egr = gap_reduction(cell.eg_mean, base->second);
      cell.egr_defined = true;
    }
    if (acc.sims.size() >= 2) {
      try {
        cell.similarity_gap_correlation = similarity_gap_correlation(acc.sims, acc.norm_gaps);
        cell.correlation_defined = true;
      } catch (const Error&) {
        cell.correlation_defined = false;  // zero variance
      }
    }
    summary.cells.push_back(std::move(cell));
  }

  // cross-benchmark averages per method, in first-appearance method order
  std::vector<MethodId> method_order;
  for (const auto& [bench, method] : order) {
    if (std::find(method_order.begin(), method_order.end(), method) == method_order.end()) {
      method_order.push_back(method);
    }
  }
  for (const MethodId method : method_order) {
    MethodSummary ms;
    ms.method = method;
    double eg_sum = 0.0, egr_sum = 0.0;
    int egr_count = 0;
    for (const CellSummary& cell : summary.cells) {
      if (cell.method != method || cell.status != "ok") continue;
      eg_sum += cell.eg_mean;
      ++ms.benchmarks;
      if (cell.egr_defined) {
        egr_sum += cell.egr;
        ++egr_count;
      }
    }
    if (ms.benchmarks > 0) {
      ms.eg_mean = eg_sum / static_cast<double>(ms.benchmarks);
      if (egr_count > 0) {
        ms.egr_mean = egr_sum / static_cast<double>(egr_count);
        ms.egr_defined = true;
      }
    }
    summary.methods.push_back(ms);
  }
  return summary;
}

}  // namespace benchpred
