#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "benchpred/ingest.hpp"

namespace benchpred {

/// Generative recipe for a synthetic benchmark: latent abilities and item
/// parameters feed a logistic response surface, optionally sampled to 0/1.
/// A trailing "frontier" block of models gets an additive ability offset so
/// top-vs-bottom experiment splits have genuinely out-of-range targets.
struct SynthSpec {
  int models = 100;
  int datapoints = 1000;
  int latent_rank = 2;            // ability dimensions
  double ability_mean = 0.0;
  double ability_sd = 1.0;
  double frontier_fraction = 0.0; // share of models in the shifted block
  double ability_shift = 0.0;     // added to the first ability dimension
  double difficulty_mean = 0.0;
  double difficulty_sd = 1.0;
  double discrimination_mean = 1.0;
  double discrimination_sd = 0.3;
  bool binary = true;             // Bernoulli draws; otherwise raw probabilities
  std::uint64_t seed = 0;
};

struct SynthLatents {
  Eigen::MatrixXd abilities;        // models x rank
  Eigen::MatrixXd discriminations;  // datapoints x rank, strictly positive
  Eigen::VectorXd difficulties;     // per data point
  Eigen::MatrixXd probabilities;    // models x datapoints, in (0,1)
  int frontier_start = 0;           // first row of the shifted block (== models if none)

  Eigen::VectorXd latent_means() const { return probabilities.rowwise().mean(); }
};

struct SynthResult {
  BenchmarkBundle bundle;
  SynthLatents latents;
};

/// Deterministic given spec.seed; regenerating is bit-identical.
SynthResult generate(const SynthSpec& spec, const std::string& name = "synthetic");

}  // namespace benchpred
