#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace benchpred::numerics {

enum class PointDistance { euclidean, correlation };

struct MedoidClustering {
  std::vector<int> medoid_indices;  // ascending
  std::vector<int> assignment;      // per point, position into medoid_indices
  std::vector<int> cluster_sizes;   // per medoid
  double objective = 0.0;           // sum of distances to assigned medoids
};

struct KMedoidsConfig {
  PointDistance distance = PointDistance::euclidean;
  int max_swap_iterations = 100;
};

/// PAM over the columns of `points` (each column is one point). Greedy
/// k-medoids++ seeding followed by best-improvement swaps until no swap
/// improves the objective or the iteration cap is hit. Ties break toward the
/// lowest index. Deterministic given seed.
MedoidClustering kmedoids(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                          const KMedoidsConfig& config = {});

/// Pairwise distance matrix used by kmedoids; exposed for oracle tests.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points, PointDistance distance);

}  // namespace benchpred::numerics
