#pragma once

#include <Eigen/Dense>

namespace benchpred::numerics {

using MissingMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct PcaImputeResult {
  Eigen::MatrixXd completed;
  int iterations = 0;
  bool converged = false;  // false means the iteration cap was hit
};

/// Iterative rank-k PCA completion. Missing entries start at their column
/// means; each round projects the column-centered matrix onto its top k
/// principal components, stops when the Frobenius norm of the change at the
/// missing entries drops below tol, and otherwise overwrites the missing
/// entries with the reconstruction. Observed entries are never modified.
///
/// The rank-k projector is obtained from the row-space Gram matrix, which is
/// kept up to date with rank-2 corrections as imputed rows change; this gives
/// the same iterates as recomputing the PCA from scratch at a fraction of the
/// cost when few rows contain missing entries.
PcaImputeResult pca_impute(const Eigen::MatrixXd& values, const MissingMask& missing,
                           int k, int max_iter = 100, double tol = 1e-4);

}  // namespace benchpred::numerics
