#include "benchpred/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "benchpred/error.hpp"

namespace benchpred {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad_config(const std::string& message) {
  throw config_error("invalid-config", message);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (allowed.find(key) == allowed.end()) {
      bad_config("unknown key '" + key + "' in " + where);
    }
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("io-error", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw config_error("invalid-config", path + ": " + e.what());
  }
}

SynthSpec parse_synth(const json& j) {
  check_keys(j,
             {"models", "datapoints", "latent_rank", "ability_mean", "ability_sd",
              "frontier_fraction", "ability_shift", "difficulty_mean", "difficulty_sd",
              "discrimination_mean", "discrimination_sd", "binary", "seed"},
             "synth spec");
  SynthSpec spec;
  spec.models = j.value("models", spec.models);
  spec.datapoints = j.value("datapoints", spec.datapoints);
  spec.latent_rank = j.value("latent_rank", spec.latent_rank);
  spec.ability_mean = j.value("ability_mean", spec.ability_mean);
  spec.ability_sd = j.value("ability_sd", spec.ability_sd);
  spec.frontier_fraction = j.value("frontier_fraction", spec.frontier_fraction);
  spec.ability_shift = j.value("ability_shift", spec.ability_shift);
  spec.difficulty_mean = j.value("difficulty_mean", spec.difficulty_mean);
  spec.difficulty_sd = j.value("difficulty_sd", spec.difficulty_sd);
  spec.discrimination_mean = j.value("discrimination_mean", spec.discrimination_mean);
  spec.discrimination_sd = j.value("discrimination_sd", spec.discrimination_sd);
  spec.binary = j.value("binary", spec.binary);
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

json synth_to_json(const SynthSpec& spec) {
  json j;
  j["models"] = spec.models;
  j["datapoints"] = spec.datapoints;
  j["latent_rank"] = spec.latent_rank;
  j["ability_mean"] = spec.ability_mean;
  j["ability_sd"] = spec.ability_sd;
  j["frontier_fraction"] = spec.frontier_fraction;
  j["ability_shift"] = spec.ability_shift;
  j["difficulty_mean"] = spec.difficulty_mean;
  j["difficulty_sd"] = spec.difficulty_sd;
  j["discrimination_mean"] = spec.discrimination_mean;
  j["discrimination_sd"] = spec.discrimination_sd;
  j["binary"] = spec.binary;
  j["seed"] = spec.seed;
  return j;
}

MethodConfig parse_method(const json& j) {
  MethodConfig config;
  if (j.is_string()) {
    config.method_id = method_from_name(j.get<std::string>());
    return config;
  }
  if (!j.is_object()) bad_config("method entries must be strings or objects");
  check_keys(j,
             {"id", "ridge_lambda", "iterations", "cv_folds", "path_length",
              "path_min_ratio", "max_sweeps", "tol", "steps", "learning_rate",
              "pi_init_sd", "distance", "max_swap_iterations", "irt_max_epochs",
              "irt_tol", "ability_prior_sd", "difficulty_prior_sd", "log_disc_prior_sd",
              "random_core", "mix_lambda", "component_grid", "max_iter"},
             "method config");
  if (!j.contains("id")) bad_config("method object needs an 'id'");
  config.method_id = method_from_name(j.at("id").get<std::string>());
  MethodHyper& h = config.hyper;
  switch (config.method_id) {
    case MethodId::random_sampling:
      break;
    case MethodId::random_sampling_learn:
      h.ridge_lambda = j.value("ridge_lambda", h.ridge_lambda);
      break;
    case MethodId::random_search_learn:
      h.ridge_lambda = j.value("ridge_lambda", h.ridge_lambda);
      h.search_iterations = j.value("iterations", h.search_iterations);
      h.cv_folds = j.value("cv_folds", h.cv_folds);
      break;
    case MethodId::lasso:
      h.lasso.path_length = j.value("path_length", h.lasso.path_length);
      h.lasso.path_min_ratio = j.value("path_min_ratio", h.lasso.path_min_ratio);
      h.lasso.max_sweeps = j.value("max_sweeps", h.lasso.max_sweeps);
      h.lasso.tol = j.value("tol", h.lasso.tol);
      break;
    case MethodId::double_optimize:
      h.optimizer.steps = j.value("steps", h.optimizer.steps);
      h.optimizer.learning_rate = j.value("learning_rate", h.optimizer.learning_rate);
      h.optimizer.pi_init_sd = j.value("pi_init_sd", h.optimizer.pi_init_sd);
      break;
    case MethodId::anchor_points_weighted:
    case MethodId::anchor_points_predictor:
    case MethodId::p_irt:
    case MethodId::gp_irt: {
      const std::string dist = j.value("distance", std::string("euclidean"));
      if (dist == "euclidean") {
        h.clustering.distance = numerics::PointDistance::euclidean;
      } else if (dist == "correlation") {
        h.clustering.distance = numerics::PointDistance::correlation;
      } else {
        bad_config("unknown clustering distance '" + dist + "'");
      }
      h.clustering.max_swap_iterations =
          j.value("max_swap_iterations", h.clustering.max_swap_iterations);
      if (config.method_id == MethodId::anchor_points_predictor) {
        h.anchor_ridge_lambda = j.value("ridge_lambda", h.anchor_ridge_lambda);
      }
      if (config.method_id == MethodId::p_irt || config.method_id == MethodId::gp_irt) {
        h.irt.max_epochs = j.value("irt_max_epochs", h.irt.max_epochs);
        h.irt.tol = j.value("irt_tol", h.irt.tol);
        h.irt.ability_prior_sd = j.value("ability_prior_sd", h.irt.ability_prior_sd);
        h.irt.difficulty_prior_sd = j.value("difficulty_prior_sd", h.irt.difficulty_prior_sd);
        h.irt.log_disc_prior_sd = j.value("log_disc_prior_sd", h.irt.log_disc_prior_sd);
        h.irt_random_core = j.value("random_core", h.irt_random_core);
      }
      if (config.method_id == MethodId::gp_irt) {
        h.gp_irt_lambda = j.value("mix_lambda", h.gp_irt_lambda);
      }
      break;
    }
    case MethodId::pca:
      h.pca_component_grid =
          j.value("component_grid", h.pca_component_grid);
      h.pca_cv_folds = j.value("cv_folds", h.pca_cv_folds);
      h.pca_max_iter = j.value("max_iter", h.pca_max_iter);
      h.pca_tol = j.value("tol", h.pca_tol);
      break;
    case MethodId::aipw:
      h.aipw_ridge_lambda = j.value("ridge_lambda", h.aipw_ridge_lambda);
      break;
  }
  return config;
}

json method_to_json(const MethodConfig& config) {
  const MethodHyper& h = config.hyper;
  json j;
  j["id"] = method_name(config.method_id);
  switch (config.method_id) {
    case MethodId::random_sampling:
      break;
    case MethodId::random_sampling_learn:
      j["ridge_lambda"] = h.ridge_lambda;
      break;
    case MethodId::random_search_learn:
      j["ridge_lambda"] = h.ridge_lambda;
      j["iterations"] = h.search_iterations;
      j["cv_folds"] = h.cv_folds;
      break;
    case MethodId::lasso:
      j["path_length"] = h.lasso.path_length;
      j["path_min_ratio"] = h.lasso.path_min_ratio;
      j["max_sweeps"] = h.lasso.max_sweeps;
      j["tol"] = h.lasso.tol;
      break;
    case MethodId::double_optimize:
      j["steps"] = h.optimizer.steps;
      j["learning_rate"] = h.optimizer.learning_rate;
      j["pi_init_sd"] = h.optimizer.pi_init_sd;
      break;
    case MethodId::anchor_points_weighted:
    case MethodId::anchor_points_predictor:
    case MethodId::p_irt:
    case MethodId::gp_irt:
      j["distance"] = h.clustering.distance == numerics::PointDistance::euclidean
                          ? "euclidean"
                          : "correlation";
      j["max_swap_iterations"] = h.clustering.max_swap_iterations;
      if (config.method_id == MethodId::anchor_points_predictor) {
        j["ridge_lambda"] = h.anchor_ridge_lambda;
      }
      if (config.method_id == MethodId::p_irt || config.method_id == MethodId::gp_irt) {
        j["irt_max_epochs"] = h.irt.max_epochs;
        j["irt_tol"] = h.irt.tol;
        j["ability_prior_sd"] = h.irt.ability_prior_sd;
        j["difficulty_prior_sd"] = h.irt.difficulty_prior_sd;
        j["log_disc_prior_sd"] = h.irt.log_disc_prior_sd;
        j["random_core"] = h.irt_random_core;
      }
      if (config.method_id == MethodId::gp_irt) j["mix_lambda"] = h.gp_irt_lambda;
      break;
    case MethodId::pca:
      j["component_grid"] = h.pca_component_grid;
      j["cv_folds"] = h.pca_cv_folds;
      j["max_iter"] = h.pca_max_iter;
      j["tol"] = h.pca_tol;
      break;
    case MethodId::aipw:
      j["ridge_lambda"] = h.aipw_ridge_lambda;
      break;
  }
  return j;
}

SplitSpec parse_split(const json& j) {
  SplitSpec split;
  if (j.is_string()) {
    const std::string kind = j.get<std::string>();
    if (kind == "interpolation") {
      split.kind = SplitKind::interpolation;
    } else if (kind == "extrapolation") {
      split.kind = SplitKind::extrapolation;
    } else {
      bad_config("unknown split kind '" + kind + "'");
    }
    return split;
  }
  check_keys(j, {"kind", "source_fraction", "bottom_fraction", "top_fraction"}, "split");
  const std::string kind = j.value("kind", std::string("interpolation"));
  if (kind == "interpolation") {
    split.kind = SplitKind::interpolation;
  } else if (kind == "extrapolation") {
    split.kind = SplitKind::extrapolation;
  } else {
    bad_config("unknown split kind '" + kind + "'");
  }
  split.source_fraction = j.value("source_fraction", split.source_fraction);
  split.bottom_fraction = j.value("bottom_fraction", split.bottom_fraction);
  split.top_fraction = j.value("top_fraction", split.top_fraction);
  return split;
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& json_text) {
  try {
    return parse_synth(json::parse(json_text));
  } catch (const json::exception& e) {
    throw config_error("invalid-config", e.what());
  }
}

SynthSpec load_synth_spec(const std::string& path) {
  return parse_synth(read_json_file(path));
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error("invalid-config", e.what());
  }
  check_keys(root, {"benchmarks", "methods", "n", "trials", "split", "seed", "clamp", "jobs"},
             "config");

  ExperimentConfig config;
  if (!root.contains("benchmarks") || !root.at("benchmarks").is_array() ||
      root.at("benchmarks").empty()) {
    bad_config("config needs a nonempty 'benchmarks' array");
  }
  for (const json& b : root.at("benchmarks")) {
    check_keys(b, {"name", "path", "synth"}, "benchmark entry");
    BenchmarkSource source;
    if (!b.contains("name")) bad_config("benchmark entry needs a 'name'");
    source.name = b.at("name").get<std::string>();
    if (source.name.empty()) bad_config("benchmark name must be nonempty");
    if (b.contains("path") == b.contains("synth")) {
      bad_config("benchmark '" + source.name + "' needs exactly one of 'path' or 'synth'");
    }
    BenchmarkBundle bundle;
    if (b.contains("path")) {
      std::filesystem::path p = b.at("path").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      source.csv_path = p.string();
      bundle = load_csv(source.csv_path);
      bundle.name = source.name;
    } else {
      source.synth = parse_synth(b.at("synth"));
      bundle = generate(*source.synth, source.name).bundle;
    }
    config.sources.push_back(std::move(source));
    config.benchmarks.push_back(std::move(bundle));
  }

  if (root.contains("methods")) {
    for (const json& m : root.at("methods")) config.methods.push_back(parse_method(m));
  } else {
    for (const MethodId id : all_methods()) config.methods.push_back({id, {}});
  }

  config.n = root.value("n", config.n);
  config.trials = root.value("trials", config.trials);
  if (root.contains("split")) config.split = parse_split(root.at("split"));
  config.base_seed = root.value("seed", config.base_seed);
  config.clamp = root.value("clamp", config.clamp);
  config.jobs = root.value("jobs", config.jobs);
  if (config.n < 1) bad_config("'n' must be >= 1");
  if (config.trials < 1) bad_config("'trials' must be >= 1");
  if (config.jobs < 1) bad_config("'jobs' must be >= 1");
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("io-error", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  return parse_experiment_config(buffer.str(), base_dir);
}

std::string effective_config_json(const ExperimentConfig& config) {
  json root;
  json benchmarks = json::array();
  for (const BenchmarkSource& source : config.sources) {
    json b;
    b["name"] = source.name;
    if (source.synth.has_value()) {
      b["synth"] = synth_to_json(*source.synth);
    } else {
      b["path"] = source.csv_path;
    }
    benchmarks.push_back(std::move(b));
  }
  root["benchmarks"] = std::move(benchmarks);
  json methods = json::array();
  for (const MethodConfig& m : config.methods) methods.push_back(method_to_json(m));
  root["methods"] = std::move(methods);
  root["n"] = config.n;
  root["trials"] = config.trials;
  json split;
  split["kind"] =
      config.split.kind == SplitKind::interpolation ? "interpolation" : "extrapolation";
  if (config.split.kind == SplitKind::interpolation) {
    split["source_fraction"] = config.split.source_fraction;
  } else {
    split["bottom_fraction"] = config.split.bottom_fraction;
    split["top_fraction"] = config.split.top_fraction;
  }
  root["split"] = std::move(split);
  root["seed"] = config.base_seed;
  root["clamp"] = config.clamp;
  // `jobs` is an execution detail, not part of the experiment identity; the
  // report must be byte-identical across different parallelism settings.
  return root.dump();
}

}  // namespace benchpred
