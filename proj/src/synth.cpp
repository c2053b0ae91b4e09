#include "benchpred/synth.hpp"

#include <algorithm>
#include <cmath>

#include "benchpred/error.hpp"
#include "benchpred/rng.hpp"

namespace benchpred {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string padded_id(const char* prefix, int i, int width) {
  std::string digits = std::to_string(i);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return prefix + digits;
}

}  // namespace

SynthResult generate(const SynthSpec& spec, const std::string& name) {
  if (spec.models < 2) throw config_error("invalid-spec", "need at least 2 models");
  if (spec.latent_rank < 1) throw config_error("invalid-spec", "latent rank must be >= 1");
  if (spec.datapoints < spec.latent_rank) {
    throw config_error("invalid-spec", "need at least `latent_rank` data points");
  }
  if (spec.frontier_fraction < 0.0 || spec.frontier_fraction > 1.0) {
    throw config_error("invalid-spec", "frontier fraction must lie in [0, 1]");
  }

  Rng rng(spec.seed);
  const int m = spec.models;
  const int n = spec.datapoints;
  const int k = spec.latent_rank;
  const int frontier_count =
      static_cast<int>(std::lround(spec.frontier_fraction * static_cast<double>(m)));

  SynthLatents latents;
  latents.frontier_start = m - frontier_count;
  latents.abilities.resize(m, k);
  for (int f = 0; f < m; ++f) {
    for (int d = 0; d < k; ++d) {
      latents.abilities(f, d) = rng.normal(spec.ability_mean, spec.ability_sd);
    }
    if (f >= latents.frontier_start) latents.abilities(f, 0) += spec.ability_shift;
  }

  // Per-dimension discriminations are positive and scaled by 1/sqrt(k) so the
  // logit spread stays comparable across ranks.
  const double disc_scale = 1.0 / std::sqrt(static_cast<double>(k));
  latents.discriminations.resize(n, k);
  latents.difficulties.resize(n);
  for (int z = 0; z < n; ++z) {
    for (int d = 0; d < k; ++d) {
      const double raw = rng.normal(spec.discrimination_mean, spec.discrimination_sd);
      latents.discriminations(z, d) = std::max(1e-3, std::abs(raw)) * disc_scale;
    }
    latents.difficulties(z) = rng.normal(spec.difficulty_mean, spec.difficulty_sd);
  }

  latents.probabilities.resize(m, n);
  for (int f = 0; f < m; ++f) {
    for (int z = 0; z < n; ++z) {
      const double logit =
          latents.discriminations.row(z).dot(latents.abilities.row(f)) -
          latents.difficulties(z);
      latents.probabilities(f, z) = sigmoid(logit);
    }
  }

  SynthResult result;
  result.latents = latents;
  result.bundle.name = name;
  result.bundle.provenance =
      "synthetic logistic response surface, seed " + std::to_string(spec.seed);

  ScoreMatrix& matrix = result.bundle.matrix;
  matrix.scores.resize(m, n);
  if (spec.binary) {
    for (int f = 0; f < m; ++f) {
      for (int z = 0; z < n; ++z) {
        matrix.scores(f, z) = rng.bernoulli(latents.probabilities(f, z)) ? 1.0 : 0.0;
      }
    }
  } else {
    matrix.scores = latents.probabilities;
  }
  matrix.binary_flag = spec.binary;

  const int id_width = std::max(3, static_cast<int>(std::to_string(m - 1).size()));
  matrix.model_ids.reserve(static_cast<std::size_t>(m));
  for (int f = 0; f < m; ++f) matrix.model_ids.push_back(padded_id("model_", f, id_width));
  const int dp_width = std::max(3, static_cast<int>(std::to_string(n - 1).size()));
  matrix.datapoint_ids.reserve(static_cast<std::size_t>(n));
  for (int z = 0; z < n; ++z) matrix.datapoint_ids.push_back(padded_id("dp_", z, dp_width));

  return result;
}

}  // namespace benchpred
