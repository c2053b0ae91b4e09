// benchpred command-line front end. Subcommands:
//   validate    check a score CSV against the matrix invariants
//   synth       generate a synthetic benchmark CSV from a spec
//   run         execute an experiment config and write a report
//   report      reload a saved report and print its aggregate table
//   similarity  per-target model-similarity scores for one split
//
// Exit codes: 0 ok, 1 config error, 2 data error, 3 runtime failure.
// stdout carries results; diagnostics and progress go to stderr as
// machine-readable lines.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "benchpred/config.hpp"
#include "benchpred/error.hpp"
#include "benchpred/harness.hpp"
#include "benchpred/ingest.hpp"
#include "benchpred/metrics.hpp"
#include "benchpred/synth.hpp"

namespace {

using benchpred::Error;
using json = nlohmann::ordered_json;

void print_error_record(const std::string& code, const std::string& message) {
  json record;
  record["error"] = code;
  record["message"] = message;
  std::cerr << record.dump() << '\n';
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void print_summary(const benchpred::ExperimentSummary& summary, std::ostream& out) {
  for (const auto& cell : summary.cells) {
    out << cell.benchmark << ' ' << benchpred::method_name(cell.method);
    if (cell.status != "ok") {
      out << " not-applicable\n";
      continue;
    }
    out << " EG=" << fmt(100.0 * cell.eg_mean) << "% +/-" << fmt(100.0 * cell.eg_sem);
    if (cell.egr_defined) out << " EGR=" << fmt(cell.egr, 1) << "%";
    if (cell.correlation_defined) {
      out << " corr=" << fmt(cell.similarity_gap_correlation, 3);
    }
    out << '\n';
  }
  for (const auto& ms : summary.methods) {
    out << "ALL " << benchpred::method_name(ms.method) << " EG=" << fmt(100.0 * ms.eg_mean);
    if (ms.egr_defined) out << "% EGR=" << fmt(ms.egr_mean, 1) << "%";
    out << " (" << ms.benchmarks << " benchmarks)\n";
  }
}

struct RunOptions {
  std::string config_path;
  std::string output;
  std::string format = "json";
  std::optional<int> n;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> split;
  std::optional<std::string> methods;
  std::optional<int> jobs;
  bool clamp = false;
  bool quiet = false;
};

int cmd_run(const RunOptions& options) {
  benchpred::ExperimentConfig config = benchpred::load_experiment_config(options.config_path);
  // flag overrides beat config-file values
  if (options.n) config.n = *options.n;
  if (options.trials) config.trials = *options.trials;
  if (options.seed) config.base_seed = *options.seed;
  if (options.jobs) config.jobs = *options.jobs;
  if (options.clamp) config.clamp = true;
  if (options.split) {
    if (*options.split == "interpolation") {
      config.split.kind = benchpred::SplitKind::interpolation;
    } else if (*options.split == "extrapolation") {
      config.split.kind = benchpred::SplitKind::extrapolation;
    } else {
      throw benchpred::config_error("invalid-config",
                                    "unknown split '" + *options.split + "'");
    }
  }
  if (options.methods) {
    config.methods.clear();
    std::string token;
    std::stringstream ss(*options.methods);
    while (std::getline(ss, token, ',')) {
      if (!token.empty()) {
        config.methods.push_back({benchpred::method_from_name(token), {}});
      }
    }
    if (config.methods.empty()) {
      throw benchpred::config_error("invalid-config", "--methods selected nothing");
    }
  }

  benchpred::ProgressFn progress;
  if (!options.quiet) {
    progress = [](const std::string& line) { std::cerr << line << '\n'; };
  }

  benchpred::RunReport report;
  report.config_json = benchpred::effective_config_json(config);
  report.trials = benchpred::run_experiment(config, progress);
  report.summary = benchpred::aggregate(report.trials);

  if (!options.output.empty()) {
    const auto format = options.format == "csv" ? benchpred::ReportFormat::csv
                                                : benchpred::ReportFormat::json;
    benchpred::save_report(report, options.output, format);
  }
  print_summary(report.summary, std::cout);
  return 0;
}

int cmd_validate(const std::string& input) {
  const benchpred::BenchmarkBundle bundle = benchpred::load_csv(input);
  // load_csv would have rejected invalid matrices; report shape + binary flag.
  std::cout << "ok models=" << bundle.matrix.models()
            << " datapoints=" << bundle.matrix.datapoints()
            << " binary=" << (bundle.matrix.binary_flag ? "true" : "false") << '\n';
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& output,
              const std::string& name, const std::string& latents_path) {
  const benchpred::SynthSpec spec = benchpred::load_synth_spec(spec_path);
  const benchpred::SynthResult result = benchpred::generate(spec, name);
  benchpred::save_csv(result.bundle, output);
  if (!latents_path.empty()) {
    json j;
    j["frontier_start"] = result.latents.frontier_start;
    j["difficulties"] = std::vector<double>(
        result.latents.difficulties.data(),
        result.latents.difficulties.data() + result.latents.difficulties.size());
    json abilities = json::array();
    for (Eigen::Index f = 0; f < result.latents.abilities.rows(); ++f) {
      abilities.push_back(std::vector<double>(
          result.latents.abilities.row(f).data(),
          result.latents.abilities.row(f).data() + result.latents.abilities.cols()));
    }
    j["abilities"] = std::move(abilities);
    j["latent_means"] = std::vector<double>(
        result.latents.latent_means().data(),
        result.latents.latent_means().data() + result.latents.latent_means().size());
    std::ofstream out(latents_path);
    if (!out) throw benchpred::data_error("io-error", "cannot write " + latents_path);
    out << j.dump(1, ' ') << '\n';
  }
  std::cout << "wrote " << output << " models=" << result.bundle.matrix.models()
            << " datapoints=" << result.bundle.matrix.datapoints() << '\n';
  return 0;
}

int cmd_report(const std::string& input, const std::string& output,
               const std::string& format) {
  const benchpred::RunReport report = benchpred::load_report(input);
  if (!output.empty()) {
    benchpred::save_report(report, output,
                           format == "csv" ? benchpred::ReportFormat::csv
                                           : benchpred::ReportFormat::json);
  }
  print_summary(report.summary, std::cout);
  return 0;
}

int cmd_similarity(const std::string& input, const std::string& split_kind,
                   double source_fraction, double bottom, double top,
                   std::uint64_t seed) {
  const benchpred::BenchmarkBundle bundle = benchpred::load_csv(input);
  if (!bundle.matrix.binary_flag) {
    throw benchpred::data_error("requires-binary",
                                "similarity analysis needs a 0/1 score matrix");
  }
  benchpred::ModelSplit split;
  if (split_kind == "interpolation") {
    split = benchpred::make_interpolation_split(bundle.matrix, source_fraction, seed);
  } else if (split_kind == "extrapolation") {
    split = benchpred::make_extrapolation_split(bundle.matrix, bottom, top).split;
  } else {
    throw benchpred::config_error("invalid-config", "unknown split '" + split_kind + "'");
  }
  Eigen::MatrixXd source(static_cast<Eigen::Index>(split.source_rows.size()),
                         bundle.matrix.datapoints());
  for (std::size_t i = 0; i < split.source_rows.size(); ++i) {
    source.row(static_cast<Eigen::Index>(i)) =
        bundle.matrix.scores.row(split.source_rows[i]);
  }
  std::cout << "model,similarity,degenerate\n";
  for (const int row : split.target_rows) {
    const benchpred::SimilarityRecord rec = benchpred::model_similarity(
        bundle.matrix.scores.row(row).transpose(), source,
        bundle.matrix.model_ids[static_cast<std::size_t>(row)]);
    std::cout << rec.target_model << ',' << fmt(rec.similarity, 9) << ','
              << (rec.degenerate ? "true" : "false") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark score prediction toolkit"};
  app.require_subcommand(1);

  RunOptions run_options;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", run_options.config_path, "experiment config JSON")->required();
  run->add_option("--output", run_options.output, "report output path");
  run->add_option("--format", run_options.format, "report format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  int n_override = 0, trials_override = 0, jobs_override = 0;
  std::uint64_t seed_override = 0;
  std::string split_override, methods_override;
  run->add_option("--n", n_override, "core-set budget override");
  run->add_option("--trials", trials_override, "trial-count override");
  run->add_option("--seed", seed_override, "base seed override");
  run->add_option("--split", split_override, "split override: interpolation|extrapolation");
  run->add_option("--methods", methods_override, "comma-separated method list override");
  run->add_option("--jobs", jobs_override, "max concurrent cells");
  run->add_flag("--clamp", run_options.clamp, "clamp estimates into [0,1]");
  run->add_flag("--quiet", run_options.quiet, "suppress per-cell progress lines");

  std::string validate_input;
  auto* validate = app.add_subcommand("validate", "validate a score CSV");
  validate->add_option("--input", validate_input, "score CSV path")->required();

  std::string synth_spec, synth_output, synth_name = "synthetic", synth_latents;
  auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark");
  synth->add_option("--spec", synth_spec, "synth spec JSON")->required();
  synth->add_option("--output", synth_output, "score CSV output path")->required();
  synth->add_option("--name", synth_name, "benchmark name");
  synth->add_option("--latents", synth_latents, "optional ground-truth latents JSON path");

  std::string report_input, report_output, report_format = "json";
  auto* report = app.add_subcommand("report", "reload a report and print its table");
  report->add_option("--input", report_input, "report JSON/CSV path")->required();
  report->add_option("--output", report_output, "re-saved report path");
  report->add_option("--format", report_format, "output format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string sim_input, sim_split = "interpolation";
  double sim_fraction = 0.75, sim_bottom = 0.50, sim_top = 0.30;
  std::uint64_t sim_seed = 0;
  auto* similarity = app.add_subcommand("similarity", "per-target similarity scores");
  similarity->add_option("--input", sim_input, "score CSV path")->required();
  similarity->add_option("--split", sim_split, "interpolation|extrapolation");
  similarity->add_option("--source-fraction", sim_fraction, "interpolation source share");
  similarity->add_option("--bottom", sim_bottom, "extrapolation source share");
  similarity->add_option("--top", sim_top, "extrapolation target share");
  similarity->add_option("--seed", sim_seed, "interpolation split seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    print_error_record("invalid-arguments", e.what());
    return 1;
  }

  try {
    if (*run) {
      if (run->count("--n")) run_options.n = n_override;
      if (run->count("--trials")) run_options.trials = trials_override;
      if (run->count("--seed")) run_options.seed = seed_override;
      if (run->count("--jobs")) run_options.jobs = jobs_override;
      if (run->count("--split")) run_options.split = split_override;
      if (run->count("--methods")) run_options.methods = methods_override;
      return cmd_run(run_options);
    }
    if (*validate) return cmd_validate(validate_input);
    if (*synth) return cmd_synth(synth_spec, synth_output, synth_name, synth_latents);
    if (*report) return cmd_report(report_input, report_output, report_format);
    if (*similarity) {
      return cmd_similarity(sim_input, sim_split, sim_fraction, sim_bottom, sim_top, sim_seed);
    }
  } catch (const Error& e) {
    print_error_record(e.code(), e.what());
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    print_error_record("runtime-failure", e.what());
    return 3;
  }
  return 0;
}
