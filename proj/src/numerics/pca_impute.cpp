#include "benchpred/numerics/pca_impute.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "benchpred/error.hpp"

namespace benchpred::numerics {

namespace {

struct RowMissing {
  int row;
  std::vector<int> cols;
};

}  // namespace

PcaImputeResult pca_impute(const Eigen::MatrixXd& values, const MissingMask& missing,
                           int k, int max_iter, double tol) {
  const auto m = values.rows();
  const auto n = values.cols();
  if (missing.rows() != m || missing.cols() != n) {
    throw Error("mask-shape-mismatch", "missing mask must match the matrix shape");
  }
  if (k < 1 || k >= std::min(m, n)) {
    throw Error("invalid-components", "need 1 <= k < min(rows, cols)");
  }

  std::vector<RowMissing> rows_missing;
  std::vector<int> missing_cols;  // union, ascending
  {
    std::vector<char> col_flag(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      RowMissing rm{static_cast<int>(i), {}};
      for (Eigen::Index j = 0; j < n; ++j) {
        if (missing(i, j)) {
          rm.cols.push_back(static_cast<int>(j));
          col_flag[static_cast<std::size_t>(j)] = 1;
        }
      }
      if (!rm.cols.empty()) rows_missing.push_back(std::move(rm));
    }
    for (int j = 0; j < n; ++j) {
      if (col_flag[static_cast<std::size_t>(j)]) missing_cols.push_back(j);
    }
  }

  Eigen::MatrixXd x = values;

  // Column-mean initialization over the observed entries.
  for (Eigen::Index j = 0; j < n; ++j) {
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!missing(i, j)) {
        sum += x(i, j);
        ++count;
      }
    }
    if (count == 0) {
      throw Error("column-unobserved", "column " + std::to_string(j) + " has no observed value");
    }
    const double colmean = sum / count;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (missing(i, j)) x(i, j) = colmean;
    }
  }

  PcaImputeResult result;
  if (rows_missing.empty()) {
    result.completed = std::move(x);
    result.iterations = 0;
    result.converged = true;
    return result;
  }

  Eigen::VectorXd mu = x.colwise().mean();
  Eigen::MatrixXd gram(m, m);
  auto rebuild_gram = [&] {
    const Eigen::MatrixXd xc = x.rowwise() - mu.transpose();
    gram.setZero();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(xc);
    gram = gram.selfadjointView<Eigen::Lower>();
  };
  rebuild_gram();

  const double inv_m = 1.0 / static_cast<double>(m);
  const int u_cols = static_cast<int>(missing_cols.size());
  Eigen::MatrixXd x_missing_block(m, u_cols);

  for (int iter = 1; iter <= max_iter; ++iter) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) {
      throw Error("eigendecomposition-failed", "PCA eigendecomposition did not converge");
    }
    const Eigen::MatrixXd basis = eig.eigenvectors().rightCols(k);  // top-k, m x k

    // Component scores at the missing columns: basis' * Xc.
    for (int c = 0; c < u_cols; ++c) {
      x_missing_block.col(c) = x.col(missing_cols[static_cast<std::size_t>(c)]);
    }
    Eigen::MatrixXd scores = basis.transpose() * x_missing_block;  // k x u
    const Eigen::VectorXd basis_colsum = basis.colwise().sum();
    for (int c = 0; c < u_cols; ++c) {
      scores.col(c) -= basis_colsum * mu(missing_cols[static_cast<std::size_t>(c)]);
    }

    std::vector<int> col_pos(static_cast<std::size_t>(n), -1);
    for (int c = 0; c < u_cols; ++c) col_pos[static_cast<std::size_t>(missing_cols[static_cast<std::size_t>(c)])] = c;

    // Reconstructions at missing entries and the convergence norm.
    double change_sq = 0.0;
    std::vector<Eigen::VectorXd> deltas(rows_missing.size());
    for (std::size_t r = 0; r < rows_missing.size(); ++r) {
      const auto& rm = rows_missing[r];
      const Eigen::RowVectorXd row_scores = basis.row(rm.row) * scores;  // 1 x u
      Eigen::VectorXd delta(static_cast<Eigen::Index>(rm.cols.size()));
      for (std::size_t c = 0; c < rm.cols.size(); ++c) {
        const int j = rm.cols[c];
        const double reconstructed = mu(j) + row_scores(col_pos[static_cast<std::size_t>(j)]);
        delta(static_cast<Eigen::Index>(c)) = reconstructed - x(rm.row, j);
      }
      change_sq += delta.squaredNorm();
      deltas[r] = std::move(delta);
    }

    result.iterations = iter;
    if (std::sqrt(change_sq) < tol) {
      result.converged = true;
      break;
    }

    // Apply the updates row by row, patching the Gram with rank-2 corrections:
    // adding (e_r - 1/m) delta' to Xc shifts the Gram by u v' + v u' + (d'd) u u'.
    for (std::size_t r = 0; r < rows_missing.size(); ++r) {
      const auto& rm = rows_missing[r];
      const Eigen::VectorXd& delta = deltas[r];

      Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
      double mu_dot = 0.0;
      for (std::size_t c = 0; c < rm.cols.size(); ++c) {
        const int j = rm.cols[c];
        v += x.col(j) * delta(static_cast<Eigen::Index>(c));
        mu_dot += mu(j) * delta(static_cast<Eigen::Index>(c));
      }
      v.array() -= mu_dot;  // v = Xc * delta

      Eigen::VectorXd u = Eigen::VectorXd::Constant(m, -inv_m);
      u(rm.row) += 1.0;
      gram += u * v.transpose() + v * u.transpose() + (delta.squaredNorm() * u) * u.transpose();

      for (std::size_t c = 0; c < rm.cols.size(); ++c) {
        const int j = rm.cols[c];
        x(rm.row, j) += delta(static_cast<Eigen::Index>(c));
        mu(j) += delta(static_cast<Eigen::Index>(c)) * inv_m;
      }
    }
    if (iter % 64 == 0) rebuild_gram();  // shed accumulated round-off
  }

  result.completed = std::move(x);
  return result;
}

}  // namespace benchpred::numerics
