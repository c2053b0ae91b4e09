#pragma once

#include <string>

#include "benchpred/harness.hpp"
#include "benchpred/synth.hpp"

namespace benchpred {

/// Reads an experiment config JSON file and loads (or generates) every
/// benchmark it references. Relative CSV paths resolve against the config
/// file's directory. Unknown keys are config errors.
ExperimentConfig load_experiment_config(const std::string& path);

/// Same, from an in-memory JSON string; `base_dir` anchors relative paths.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir);

/// Serializes the fully-resolved configuration (every default spelled out,
/// deterministic key order) for embedding into reports.
std::string effective_config_json(const ExperimentConfig& config);

SynthSpec parse_synth_spec(const std::string& json_text);
SynthSpec load_synth_spec(const std::string& path);

}  // namespace benchpred
