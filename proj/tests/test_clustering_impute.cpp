#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "benchpred/error.hpp"
#include "benchpred/numerics/kmedoids.hpp"
#include "benchpred/numerics/pca_impute.hpp"
#include "test_support.hpp"

using namespace benchpred;
using namespace benchpred::numerics;
using benchpred::test::random_gaussian;
using benchpred::test::random_matrix;

namespace {

// Exhaustive search over all k-subsets of medoids.
double brute_force_objective(const Eigen::MatrixXd& dist, int k) {
  const int n = static_cast<int>(dist.rows());
  std::vector<int> pick(static_cast<std::size_t>(k));
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> stack;
  // iterative combination enumeration
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == k) {
      double obj = 0.0;
      for (int j = 0; j < n; ++j) {
        double d = std::numeric_limits<double>::infinity();
        for (const int m : pick) d = std::min(d, dist(m, j));
        obj += d;
      }
      best = std::min(best, obj);
      return;
    }
    for (int m = start; m < n; ++m) {
      pick[static_cast<std::size_t>(depth)] = m;
      recurse(m + 1, depth + 1);
    }
  };
  recurse(0, 0);
  return best;
}

// Straightforward reference for the iterative PCA completion: column-mean
// init, full SVD reconstruction each round, same stopping rule.
Eigen::MatrixXd naive_pca_impute(Eigen::MatrixXd x, const MissingMask& missing, int k,
                                 int max_iter, double tol) {
  const auto m = x.rows();
  const auto n = x.cols();
  for (Eigen::Index j = 0; j < n; ++j) {
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!missing(i, j)) {
        sum += x(i, j);
        ++count;
      }
    }
    const double mean = sum / count;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (missing(i, j)) x(i, j) = mean;
    }
  }
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::RowVectorXd mu = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mu;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd recon = svd.matrixU().leftCols(k) *
                            svd.singularValues().head(k).asDiagonal() *
                            svd.matrixV().leftCols(k).transpose();
    recon.rowwise() += mu;
    double change_sq = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (missing(i, j)) {
          const double d = recon(i, j) - x(i, j);
          change_sq += d * d;
        }
      }
    }
    if (std::sqrt(change_sq) < tol) break;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (missing(i, j)) x(i, j) = recon(i, j);
      }
    }
  }
  return x;
}

}  // namespace

TEST_CASE("kmedoids: duplicate pairs cluster losslessly") {
  Eigen::MatrixXd points(2, 4);
  points.col(0) << 0.0, 0.0;
  points.col(1) << 1.0, 1.0;
  points.col(2) << 0.0, 0.0;
  points.col(3) << 1.0, 1.0;
  const MedoidClustering result = kmedoids(points, 2, 5);
  CHECK(result.objective == doctest::Approx(0.0));
  REQUIRE(result.medoid_indices.size() == 2);
  const int a = result.medoid_indices[0] % 2;
  const int b = result.medoid_indices[1] % 2;
  CHECK(a != b);  // one medoid per duplicate group
  CHECK(result.cluster_sizes[0] + result.cluster_sizes[1] == 4);
}

TEST_CASE("kmedoids: k equal to point count is exact") {
  Rng rng(7);
  const Eigen::MatrixXd points = random_matrix(3, 5, rng);
  const MedoidClustering result = kmedoids(points, 5, 99);
  CHECK(result.objective == doctest::Approx(0.0));
  CHECK(result.medoid_indices == std::vector<int>{0, 1, 2, 3, 4});
  for (const int size : result.cluster_sizes) CHECK(size == 1);
}

TEST_CASE("kmedoids: matches exhaustive enumeration on small instances") {
  Rng rng(13);
  for (int n = 4; n <= 8; ++n) {
    for (int k = 1; k <= 3 && k <= n; ++k) {
      for (int rep = 0; rep < 5; ++rep) {
        const Eigen::MatrixXd points = random_matrix(3, n, rng);
        const MedoidClustering result =
            kmedoids(points, k, static_cast<std::uint64_t>(n * 100 + k * 10 + rep));
        const Eigen::MatrixXd dist = pairwise_distances(points, PointDistance::euclidean);
        const double best = brute_force_objective(dist, k);
        CHECK(result.objective == doctest::Approx(best).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("kmedoids: deterministic given seed and rejects k > N") {
  Rng rng(17);
  const Eigen::MatrixXd points = random_matrix(4, 9, rng);
  const MedoidClustering a = kmedoids(points, 3, 42);
  const MedoidClustering b = kmedoids(points, 3, 42);
  CHECK(a.medoid_indices == b.medoid_indices);
  CHECK(a.objective == b.objective);
  CHECK_THROWS_AS(kmedoids(points, 10, 1), Error);
}

TEST_CASE("kmedoids: correlation distance handles constant columns") {
  Eigen::MatrixXd points(4, 3);
  points.col(0) << 0.2, 0.4, 0.6, 0.8;
  points.col(1) << 0.8, 0.6, 0.4, 0.2;
  points.col(2).setConstant(0.5);
  KMedoidsConfig config;
  config.distance = PointDistance::correlation;
  const MedoidClustering result = kmedoids(points, 2, 3, config);
  CHECK(result.medoid_indices.size() == 2);
  CHECK(result.objective >= 0.0);
}

TEST_CASE("pca_impute: recovers an exactly rank-1 matrix") {
  Rng rng(19);
  const Eigen::VectorXd u = random_matrix(12, 1, rng, 0.5, 1.5);
  const Eigen::VectorXd v = random_matrix(15, 1, rng, 0.2, 0.8);
  const Eigen::MatrixXd truth = u * v.transpose();
  MissingMask missing = MissingMask::Constant(12, 15, false);
  int dropped = 0;
  while (dropped < 18) {  // 10% of 180
    const int i = rng.index(12);
    const int j = rng.index(15);
    if (!missing(i, j)) {
      missing(i, j) = true;
      ++dropped;
    }
  }
  Eigen::MatrixXd observed = truth;
  const PcaImputeResult result = pca_impute(observed, missing, 1, 5000, 1e-10);
  CHECK((result.completed - truth).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("pca_impute: nothing missing returns the input unchanged") {
  Rng rng(23);
  const Eigen::MatrixXd x = random_matrix(6, 7, rng);
  const MissingMask missing = MissingMask::Constant(6, 7, false);
  const PcaImputeResult result = pca_impute(x, missing, 2, 100, 1e-6);
  CHECK(result.converged);
  CHECK(result.iterations <= 1);
  CHECK((result.completed.array() == x.array()).all());
}

TEST_CASE("pca_impute: missing entry in a constant column gets the column value") {
  Rng rng(29);
  Eigen::MatrixXd x = random_matrix(8, 5, rng);
  x.col(2).setConstant(0.37);
  MissingMask missing = MissingMask::Constant(8, 5, false);
  missing(4, 2) = true;
  const PcaImputeResult result = pca_impute(x, missing, 2, 100, 1e-8);
  CHECK(result.completed(4, 2) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("pca_impute: observed entries are never touched") {
  Rng rng(31);
  const Eigen::MatrixXd x = random_matrix(10, 12, rng);
  MissingMask missing = MissingMask::Constant(10, 12, false);
  for (int i = 0; i < 10; ++i) missing(i, rng.index(12)) = true;
  const PcaImputeResult result = pca_impute(x, missing, 3, 50, 1e-6);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 12; ++j) {
      if (!missing(i, j)) CHECK(result.completed(i, j) == x(i, j));
    }
  }
}

TEST_CASE("pca_impute: fully missing column is rejected") {
  Rng rng(37);
  const Eigen::MatrixXd x = random_matrix(6, 4, rng);
  MissingMask missing = MissingMask::Constant(6, 4, false);
  missing.col(1).setConstant(true);
  CHECK_THROWS_WITH_AS(pca_impute(x, missing, 1, 10, 1e-6),
                       doctest::Contains("no observed value"), Error);
}

TEST_CASE("pca_impute: agrees with the naive SVD reference") {
  Rng rng(41);
  for (int rep = 0; rep < 4; ++rep) {
    const int m = 9 + rep;
    const int n = 11 + rep;
    const Eigen::MatrixXd x = random_matrix(m, n, rng);
    MissingMask missing = MissingMask::Constant(m, n, false);
    for (int i = 0; i < m; ++i) {
      missing(i, rng.index(n)) = true;
      missing(i, rng.index(n)) = true;
    }
    const int k = 2 + rep % 2;
    const int iters = 12;
    // tol 0 pins both routes to exactly `iters` reconstruction rounds
    const PcaImputeResult fast = pca_impute(x, missing, k, iters, 0.0);
    const Eigen::MatrixXd slow = naive_pca_impute(x, missing, k, iters, 0.0);
    CHECK((fast.completed - slow).cwiseAbs().maxCoeff() < 1e-9);
  }
}
