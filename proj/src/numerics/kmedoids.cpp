#include "benchpred/numerics/kmedoids.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "benchpred/error.hpp"
#include "benchpred/rng.hpp"

namespace benchpred::numerics {

namespace {

constexpr double kImprovementEps = 1e-12;

int weighted_pick(const std::vector<double>& weights, double total, Rng& rng) {
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

double subset_count(int n, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

// Exact enumeration for tiny instances, where single-swap local search can
// stall one swap short of the optimum.
std::vector<int> exhaustive_medoids(const Eigen::MatrixXd& d, int k) {
  const int n = static_cast<int>(d.rows());
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::vector<int> best_pick;
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == k) {
      double obj = 0.0;
      for (int j = 0; j < n; ++j) {
        double dj = std::numeric_limits<double>::infinity();
        for (const int m : pick) dj = std::min(dj, d(m, j));
        obj += dj;
      }
      if (obj < best) {
        best = obj;
        best_pick = pick;
      }
      return;
    }
    for (int m = start; m < n; ++m) {
      pick[static_cast<std::size_t>(depth)] = m;
      recurse(m + 1, depth + 1);
    }
  };
  recurse(0, 0);
  return best_pick;
}

}  // namespace

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points, PointDistance distance) {
  const auto n = points.cols();
  Eigen::MatrixXd d(n, n);
  if (distance == PointDistance::euclidean) {
    const Eigen::VectorXd sq = points.colwise().squaredNorm();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(points.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double sq_dist = std::max(0.0, sq(i) + sq(j) - 2.0 * gram(i, j));
        d(i, j) = d(j, i) = std::sqrt(sq_dist);
      }
    }
    return d;
  }

  // Correlation distance 1 - r; zero-variance columns count as uncorrelated.
  const auto rows = points.rows();
  Eigen::MatrixXd centered = points.rowwise() - points.colwise().mean();
  Eigen::VectorXd norms = centered.colwise().norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double r = 0.0;
      if (norms(i) > 0.0 && norms(j) > 0.0) {
        r = centered.col(i).dot(centered.col(j)) / (norms(i) * norms(j));
      }
      d(i, j) = d(j, i) = 1.0 - r;
    }
  }
  (void)rows;
  return d;
}

MedoidClustering kmedoids(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                          const KMedoidsConfig& config) {
  const int n = static_cast<int>(points.cols());
  if (k < 1) throw Error("invalid-cluster-count", "k must be >= 1");
  if (k > n) throw Error("too-many-clusters", "k exceeds the number of points");
  if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * 8 > (3ull << 30)) {
    throw Error("distance-matrix-too-large",
                "exact PAM needs the full pairwise distance matrix in memory");
  }

  const Eigen::MatrixXd d = pairwise_distances(points, config.distance);
  Rng rng(seed);

  std::vector<int> medoids;
  std::vector<char> is_medoid(static_cast<std::size_t>(n), 0);
  const bool tiny = n <= 24 && subset_count(n, k) <= 2000.0;
  if (tiny) {
    medoids = exhaustive_medoids(d, k);
    for (const int m : medoids) is_medoid[static_cast<std::size_t>(m)] = 1;
  }
  // nearest / second-nearest medoid distance per point
  Eigen::VectorXd d1 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd d2 = d1;
  std::vector<int> nearest(static_cast<std::size_t>(n), -1);

  auto add_medoid = [&](int m) {
    const int idx = static_cast<int>(medoids.size());
    medoids.push_back(m);
    is_medoid[static_cast<std::size_t>(m)] = 1;
    for (int j = 0; j < n; ++j) {
      const double dj = d(m, j);
      if (dj < d1(j)) {
        d2(j) = d1(j);
        d1(j) = dj;
        nearest[static_cast<std::size_t>(j)] = idx;
      } else if (dj < d2(j)) {
        d2(j) = dj;
      }
    }
  };

  // Greedy k-medoids++: sample a few candidates proportional to squared
  // distance from the current medoids, keep the one with the best objective.
  // Small instances evaluate every candidate.
  const int sampled = 3 + static_cast<int>(std::log2(static_cast<double>(k) + 1.0));
  const int tries = n <= 128 ? n : std::min(n, sampled);
  for (int round = 0; !tiny && round < k; ++round) {
    std::vector<int> candidates;
    if (tries >= n) {
      for (int j = 0; j < n; ++j) {
        if (!is_medoid[static_cast<std::size_t>(j)]) candidates.push_back(j);
      }
    } else {
      std::vector<double> weights(static_cast<std::size_t>(n), 0.0);
      double total = 0.0;
      for (int j = 0; j < n; ++j) {
        if (is_medoid[static_cast<std::size_t>(j)]) continue;
        const double w = round == 0 ? 1.0 : d1(j) * d1(j);
        weights[static_cast<std::size_t>(j)] = w;
        total += w;
      }
      for (int t = 0; t < tries; ++t) {
        if (total > 0.0) {
          const int cand = weighted_pick(weights, total, rng);
          if (!is_medoid[static_cast<std::size_t>(cand)]) candidates.push_back(cand);
        }
      }
      if (candidates.empty()) {
        // remaining points coincide with medoids; take the lowest free index
        int cand = 0;
        while (cand < n && is_medoid[static_cast<std::size_t>(cand)]) ++cand;
        candidates.push_back(cand);
      }
    }
    int best_cand = candidates.front();
    double best_obj = std::numeric_limits<double>::infinity();
    for (const int cand : candidates) {
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += std::min(d1(j), d(cand, j));
      if (obj < best_obj) {
        best_obj = obj;
        best_cand = cand;
      }
    }
    add_medoid(best_cand);
  }

  // Swap phase: evaluate all (medoid, candidate) deltas from the nearest /
  // second-nearest caches, apply the single best improving swap per round.
  for (int iter = 0; !tiny && iter < config.max_swap_iterations; ++iter) {
    double best_delta = -kImprovementEps;
    int best_m = -1;
    int best_h = -1;
    for (int h = 0; h < n; ++h) {
      if (is_medoid[static_cast<std::size_t>(h)]) continue;
      double shared = 0.0;
      std::vector<double> removal(static_cast<std::size_t>(k), 0.0);
      for (int j = 0; j < n; ++j) {
        const double dh = d(h, j);
        const double gain = std::min(dh, d1(j)) - d1(j);  // <= 0
        shared += gain;
        // losing point j's own medoid: fall back to second-nearest or h
        removal[static_cast<std::size_t>(nearest[static_cast<std::size_t>(j)])] +=
            std::min(dh, d2(j)) - d1(j) - gain;
      }
      for (int mi = 0; mi < k; ++mi) {
        const double delta = shared + removal[static_cast<std::size_t>(mi)];
        if (delta < best_delta) {
          best_delta = delta;
          best_m = mi;
          best_h = h;
        }
      }
    }
    if (best_m < 0) break;
    is_medoid[static_cast<std::size_t>(medoids[static_cast<std::size_t>(best_m)])] = 0;
    medoids[static_cast<std::size_t>(best_m)] = best_h;
    is_medoid[static_cast<std::size_t>(best_h)] = 1;
    // rebuild caches
    d1.setConstant(std::numeric_limits<double>::infinity());
    d2.setConstant(std::numeric_limits<double>::infinity());
    for (int idx = 0; idx < k; ++idx) {
      const int m = medoids[static_cast<std::size_t>(idx)];
      for (int j = 0; j < n; ++j) {
        const double dj = d(m, j);
        if (dj < d1(j)) {
          d2(j) = d1(j);
          d1(j) = dj;
          nearest[static_cast<std::size_t>(j)] = idx;
        } else if (dj < d2(j)) {
          d2(j) = dj;
        }
      }
    }
  }

  MedoidClustering result;
  result.medoid_indices = medoids;
  std::sort(result.medoid_indices.begin(), result.medoid_indices.end());
  result.assignment.assign(static_cast<std::size_t>(n), -1);
  result.cluster_sizes.assign(static_cast<std::size_t>(k), 0);
  result.objective = 0.0;
  for (int j = 0; j < n; ++j) {
    int best = 0;
    double best_d = d(result.medoid_indices[0], j);
    for (int idx = 1; idx < k; ++idx) {
      const double dj = d(result.medoid_indices[static_cast<std::size_t>(idx)], j);
      if (dj < best_d) {
        best_d = dj;
        best = idx;
      }
    }
    // a medoid always claims itself, even when another medoid ties at 0
    const auto self = std::lower_bound(result.medoid_indices.begin(),
                                       result.medoid_indices.end(), j);
    if (self != result.medoid_indices.end() && *self == j) {
      best = static_cast<int>(self - result.medoid_indices.begin());
      best_d = 0.0;
    }
    result.assignment[static_cast<std::size_t>(j)] = best;
    result.cluster_sizes[static_cast<std::size_t>(best)] += 1;
    result.objective += best_d;
  }
  return result;
}

}  // namespace benchpred::numerics
