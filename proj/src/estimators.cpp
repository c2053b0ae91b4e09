#include "benchpred/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "benchpred/error.hpp"
#include "benchpred/numerics/pca_impute.hpp"
#include "benchpred/numerics/ridge.hpp"
#include "benchpred/rng.hpp"

namespace benchpred {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<int> offcore_indices(int total, const std::vector<int>& core) {
  std::vector<char> in_core(static_cast<std::size_t>(total), 0);
  for (const int c : core) in_core[static_cast<std::size_t>(c)] = 1;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(total) - core.size());
  for (int j = 0; j < total; ++j) {
    if (!in_core[static_cast<std::size_t>(j)]) out.push_back(j);
  }
  return out;
}

MatrixXd gather_columns(const MatrixXd& source, const std::vector<int>& cols) {
  MatrixXd out(source.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = source.col(cols[i]);
  }
  return out;
}

CoreSet sample_core(int total, int n, std::uint64_t seed) {
  if (n < 1) throw Error("invalid-budget", "core budget must be >= 1");
  if (n > total) throw Error("budget-exceeds-dataset", "core budget exceeds data points");
  return make_core(Rng(seed).sample_without_replacement(total, n));
}

void require_binary_scores(const MatrixXd& source) {
  if (!all_binary(source)) {
    throw Error("requires-binary", "method is defined only for 0/1 score matrices");
  }
}

// --- concrete estimators ---

class MeanEstimator final : public FittedEstimator {
 public:
  MeanEstimator(CoreSet core) : FittedEstimator(MethodId::random_sampling, std::move(core)) {}

 private:
  double estimate_impl(const VectorXd& core_scores) const override {
    return core_scores.mean();
  }
};

class RidgeEstimator final : public FittedEstimator {
 public:
  RidgeEstimator(MethodId id, CoreSet core, numerics::RidgeModel model)
      : FittedEstimator(id, std::move(core)), model_(std::move(model)) {}

 private:
  double estimate_impl(const VectorXd& core_scores) const override {
    return model_.predict(core_scores);
  }
  numerics::RidgeModel model_;
};

// Sparse linear head shared by lasso and double-optimize: weights aligned
// with the core indices plus an optional intercept.
class LinearHeadEstimator final : public FittedEstimator {
 public:
  LinearHeadEstimator(MethodId id, CoreSet core, VectorXd weights, double intercept)
      : FittedEstimator(id, std::move(core)),
        weights_(std::move(weights)),
        intercept_(intercept) {}

 private:
  double estimate_impl(const VectorXd& core_scores) const override {
    return weights_.dot(core_scores) + intercept_;
  }
  VectorXd weights_;
  double intercept_;
};

class WeightedCoreEstimator final : public FittedEstimator {
 public:
  WeightedCoreEstimator(CoreSet core)
      : FittedEstimator(MethodId::anchor_points_weighted, std::move(core)) {
    const auto& w = *core_set().weights;
    weights_ = Eigen::Map<const VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  }

 private:
  double estimate_impl(const VectorXd& core_scores) const override {
    return weights_.dot(core_scores);
  }
  VectorXd weights_;
};

class OffcoreRegressionEstimator final : public FittedEstimator {
 public:
  OffcoreRegressionEstimator(CoreSet core, numerics::MultiRidgeModel model)
      : FittedEstimator(MethodId::anchor_points_predictor, std::move(core)),
        model_(std::move(model)) {}

 private:
  double estimate_impl(const VectorXd& core_scores) const override {
    return model_.predict(core_scores).mean();
  }
  numerics::MultiRidgeModel model_;
};

class PIrtEstimator final : public FittedEstimator {
 public:
  PIrtEstimator(CoreSet core, numerics::IrtModel model, std::vector<int> offcore, int total)
      : FittedEstimator(MethodId::p_irt, std::move(core)),
        model_(std::move(model)),
        offcore_(std::move(offcore)),
        total_(total) {}

  const numerics::IrtModel& irt() const { return model_; }

 private:
  double estimate_impl(const VectorXd& core_scores) const override {
    const double ability = numerics::irt_ability(model_, core_set().indices, core_scores);
    const double gbar = model_.mean_probability(ability, offcore_);
    const double n = static_cast<double>(core_set().size());
    const double total = static_cast<double>(total_);
    return (total - n) / total * gbar + n / total * core_scores.mean();
  }

  numerics::IrtModel model_;
  std::vector<int> offcore_;
  int total_;
};

class GpIrtEstimator final : public FittedEstimator {
 public:
  GpIrtEstimator(CoreSet core, EstimatorPtr weighted, EstimatorPtr p_irt, double lambda)
      : FittedEstimator(MethodId::gp_irt, std::move(core)),
        weighted_(std::move(weighted)),
        p_irt_(std::move(p_irt)),
        lambda_(lambda) {}

 private:
  double estimate_impl(const VectorXd& core_scores) const override {
    return lambda_ * weighted_->estimate(core_scores) +
           (1.0 - lambda_) * p_irt_->estimate(core_scores);
  }
  EstimatorPtr weighted_;
  EstimatorPtr p_irt_;
  double lambda_;
};

class PcaEstimator final : public FittedEstimator {
 public:
  PcaEstimator(CoreSet core, MatrixXd source, int components, int max_iter, double tol)
      : FittedEstimator(MethodId::pca, std::move(core)),
        source_(std::move(source)),
        components_(components),
        max_iter_(max_iter),
        tol_(tol) {}

  int components() const { return components_; }

 private:
  double estimate_impl(const VectorXd& core_scores) const override {
    const auto m = source_.rows();
    const auto n_cols = source_.cols();
    MatrixXd stacked(m + 1, n_cols);
    stacked.topRows(m) = source_;
    stacked.row(m).setZero();
    numerics::MissingMask missing = numerics::MissingMask::Constant(m + 1, n_cols, false);
    missing.row(m).setConstant(true);
    const auto& core = core_set().indices;
    for (std::size_t i = 0; i < core.size(); ++i) {
      stacked(m, core[i]) = core_scores(static_cast<Eigen::Index>(i));
      missing(m, core[i]) = false;
    }
    const auto result = numerics::pca_impute(stacked, missing, components_, max_iter_, tol_);
    return result.completed.row(m).mean();
  }

  MatrixXd source_;
  int components_;
  int max_iter_;
  double tol_;
};

class AipwEstimator final : public FittedEstimator {
 public:
  AipwEstimator(CoreSet core, MatrixXd features_by_point, double lambda)
      : FittedEstimator(MethodId::aipw, std::move(core)),
        features_(std::move(features_by_point)),
        offcore_(offcore_indices(static_cast<int>(features_.rows()), core_set().indices)),
        lambda_(lambda) {}

 private:
  double estimate_impl(const VectorXd& core_scores) const override {
    const double core_mean = core_scores.mean();
    if (offcore_.empty()) return core_mean;

    const auto& core = core_set().indices;
    MatrixXd train(static_cast<Eigen::Index>(core.size()), features_.cols());
    for (std::size_t i = 0; i < core.size(); ++i) {
      train.row(static_cast<Eigen::Index>(i)) = features_.row(core[i]);
    }
    const numerics::RidgeModel proxy = numerics::ridge_fit(train, core_scores, lambda_);
    const VectorXd predicted = proxy.predict_rows(features_);

    double core_sum = 0.0;
    for (const int z : core) core_sum += predicted(z);
    double off_sum = 0.0;
    for (const int z : offcore_) off_sum += predicted(z);
    return aipw_combine(core_mean, core_sum / static_cast<double>(core.size()),
                        off_sum / static_cast<double>(offcore_.size()),
                        static_cast<int>(core.size()),
                        static_cast<int>(features_.rows()));
  }

  MatrixXd features_;  // one row per data point: the source models' scores on it
  std::vector<int> offcore_;
  double lambda_;
};

VectorXd row_means(const MatrixXd& source) { return source.rowwise().mean(); }

struct AnchorParts {
  CoreSet core;
  std::vector<double> weights;
};

AnchorParts anchor_core(const MatrixXd& source, int n, std::uint64_t seed,
                        const numerics::KMedoidsConfig& config) {
  const int total = static_cast<int>(source.cols());
  if (n > total) throw Error("budget-exceeds-dataset", "core budget exceeds data points");
  const auto clustering = numerics::kmedoids(source, n, seed, config);
  std::vector<double> weights(clustering.cluster_sizes.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = static_cast<double>(clustering.cluster_sizes[i]) / static_cast<double>(total);
  }
  return {make_weighted_core(clustering.medoid_indices, weights), std::move(weights)};
}

EstimatorPtr make_p_irt(const MatrixXd& source, CoreSet core,
                        const numerics::IrtConfig& irt_config) {
  require_binary_scores(source);
  const int total = static_cast<int>(source.cols());
  if (core.size() >= total) {
    throw Error("invalid-budget", "p-irt needs a core smaller than the dataset");
  }
  numerics::IrtModel model = numerics::irt_fit(source, irt_config);
  std::vector<int> off = offcore_indices(total, core.indices);
  return std::make_unique<PIrtEstimator>(std::move(core), std::move(model), std::move(off),
                                         total);
}

}  // namespace

double FittedEstimator::estimate(const VectorXd& core_scores) const {
  if (core_scores.size() != static_cast<Eigen::Index>(core_.indices.size())) {
    throw Error("length-mismatch", "core scores must align with the core set");
  }
  return estimate_impl(core_scores);
}

double aipw_combine(double core_mean, double proxy_core_mean, double proxy_offcore_mean,
                    int n, int total) {
  const double fraction = static_cast<double>(total - n) / static_cast<double>(total);
  return core_mean + fraction * (proxy_offcore_mean - proxy_core_mean);
}

EstimatorPtr fit_random_sampling(const MatrixXd& source, CoreSet core) {
  check_core(core, source.cols());
  return std::make_unique<MeanEstimator>(std::move(core));
}

EstimatorPtr fit_random_sampling(const MatrixXd& source, int n, std::uint64_t seed) {
  return fit_random_sampling(source, sample_core(static_cast<int>(source.cols()), n, seed));
}

EstimatorPtr fit_random_sampling_learn(const MatrixXd& source, CoreSet core, double lambda) {
  check_core(core, source.cols());
  const MatrixXd features = gather_columns(source, core.indices);
  const numerics::RidgeModel model = numerics::ridge_fit(features, row_means(source), lambda);
  return std::make_unique<RidgeEstimator>(MethodId::random_sampling_learn, std::move(core),
                                          model);
}

EstimatorPtr fit_random_sampling_learn(const MatrixXd& source, int n, std::uint64_t seed,
                                       double lambda) {
  return fit_random_sampling_learn(source, sample_core(static_cast<int>(source.cols()), n, seed),
                                   lambda);
}

EstimatorPtr fit_random_search_learn(const MatrixXd& source, int n, std::uint64_t seed,
                                     int iterations, int folds, double lambda) {
  const int total = static_cast<int>(source.cols());
  const int models = static_cast<int>(source.rows());
  if (iterations < 1) throw Error("invalid-iterations", "need >= 1 candidate subsets");
  if (folds < 2) throw Error("invalid-folds", "cross-validation needs >= 2 folds");
  if (models < folds) throw Error("too-few-samples", "need at least `folds` source models");
  if (n > total) throw Error("budget-exceeds-dataset", "core budget exceeds data points");

  Rng rng(seed);
  std::vector<int> fold_of(static_cast<std::size_t>(models));
  {
    std::vector<int> order(static_cast<std::size_t>(models));
    for (int i = 0; i < models; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    for (int i = 0; i < models; ++i) {
      fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i % folds;
    }
  }
  const VectorXd means = row_means(source);

  std::vector<int> best_core;
  double best_cv = std::numeric_limits<double>::infinity();
  for (int it = 0; it < iterations; ++it) {
    const std::vector<int> candidate = rng.sample_without_replacement(total, n);
    const MatrixXd features = gather_columns(source, candidate);
    double abs_err = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<int> train_rows;
      std::vector<int> test_rows;
      for (int i = 0; i < models; ++i) {
        (fold_of[static_cast<std::size_t>(i)] == f ? test_rows : train_rows).push_back(i);
      }
      MatrixXd train_x(static_cast<Eigen::Index>(train_rows.size()), features.cols());
      VectorXd train_y(static_cast<Eigen::Index>(train_rows.size()));
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        train_x.row(static_cast<Eigen::Index>(i)) = features.row(train_rows[i]);
        train_y(static_cast<Eigen::Index>(i)) = means(train_rows[i]);
      }
      const numerics::RidgeModel model = numerics::ridge_fit(train_x, train_y, lambda);
      for (const int i : test_rows) {
        abs_err += std::abs(model.predict(features.row(i).transpose()) - means(i));
      }
    }
    const double cv = abs_err / static_cast<double>(models);
    if (cv < best_cv) {
      best_cv = cv;
      best_core = candidate;
    }
  }
  return fit_random_sampling_learn(source, make_core(best_core), lambda);
}

EstimatorPtr fit_lasso(const MatrixXd& source, int n, const numerics::LassoConfig& config) {
  if (n > source.cols()) {
    throw Error("budget-exceeds-dataset", "core budget exceeds data points");
  }
  const numerics::LassoModel model = numerics::lasso_select(source, row_means(source), n, config);
  VectorXd head(static_cast<Eigen::Index>(model.support.size()));
  for (std::size_t i = 0; i < model.support.size(); ++i) {
    head(static_cast<Eigen::Index>(i)) = model.weights(model.support[i]);
  }
  return std::make_unique<LinearHeadEstimator>(MethodId::lasso, make_core(model.support),
                                               std::move(head), model.intercept);
}

EstimatorPtr fit_double_optimize(const MatrixXd& source, int n, std::uint64_t seed,
                                 const numerics::MaskedLinearConfig& config) {
  if (n > source.cols()) {
    throw Error("budget-exceeds-dataset", "core budget exceeds data points");
  }
  const numerics::MaskedLinearModel model =
      numerics::masked_linear_fit(source, row_means(source), n, seed, config);
  const std::vector<int> support = model.mask();
  VectorXd head(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    head(static_cast<Eigen::Index>(i)) = model.weights(support[i]);
  }
  return std::make_unique<LinearHeadEstimator>(MethodId::double_optimize, make_core(support),
                                               std::move(head), 0.0);
}

EstimatorPtr fit_anchor_weighted(const MatrixXd& source, int n, std::uint64_t seed,
                                 const numerics::KMedoidsConfig& config) {
  AnchorParts parts = anchor_core(source, n, seed, config);
  return std::make_unique<WeightedCoreEstimator>(std::move(parts.core));
}

EstimatorPtr fit_anchor_predictor(const MatrixXd& source, int n, std::uint64_t seed,
                                  const numerics::KMedoidsConfig& config, double lambda) {
  const int total = static_cast<int>(source.cols());
  if (n >= total) {
    throw Error("invalid-budget", "anchor-points-predictor needs a core smaller than the dataset");
  }
  AnchorParts parts = anchor_core(source, n, seed, config);
  const std::vector<int> off = offcore_indices(total, parts.core.indices);
  const MatrixXd features = gather_columns(source, parts.core.indices);
  const MatrixXd labels = gather_columns(source, off);
  numerics::MultiRidgeModel model = numerics::ridge_fit_multi(features, labels, lambda);
  // weights are clustering metadata; the regression ignores them
  CoreSet core = make_core(parts.core.indices);
  return std::make_unique<OffcoreRegressionEstimator>(std::move(core), std::move(model));
}

EstimatorPtr fit_p_irt(const MatrixXd& source, CoreSet core,
                       const numerics::IrtConfig& irt_config) {
  check_core(core, source.cols());
  return make_p_irt(source, std::move(core), irt_config);
}

EstimatorPtr fit_p_irt(const MatrixXd& source, int n, std::uint64_t seed,
                       const numerics::IrtConfig& irt_config,
                       const numerics::KMedoidsConfig& clustering) {
  AnchorParts parts = anchor_core(source, n, seed, clustering);
  return make_p_irt(source, make_core(parts.core.indices), irt_config);
}

EstimatorPtr fit_gp_irt(const MatrixXd& source, int n, std::uint64_t seed, double lambda_mix,
                        const numerics::IrtConfig& irt_config,
                        const numerics::KMedoidsConfig& clustering) {
  require_binary_scores(source);
  if (lambda_mix < 0.0 || lambda_mix > 1.0) {
    throw Error("invalid-mix", "gp-irt lambda must lie in [0, 1]");
  }
  // Both components share one medoid core set.
  AnchorParts parts = anchor_core(source, n, seed, clustering);
  EstimatorPtr weighted = std::make_unique<WeightedCoreEstimator>(
      make_weighted_core(parts.core.indices, parts.weights));
  EstimatorPtr p_irt = make_p_irt(source, make_core(parts.core.indices), irt_config);
  return std::make_unique<GpIrtEstimator>(make_core(parts.core.indices), std::move(weighted),
                                          std::move(p_irt), lambda_mix);
}

int pca_select_components(const MatrixXd& source, const std::vector<int>& core,
                          const std::vector<int>& grid, int cv_folds, std::uint64_t cv_seed,
                          int max_iter, double tol) {
  const int models = static_cast<int>(source.rows());
  const int total = static_cast<int>(source.cols());
  std::vector<int> usable;
  for (const int k : grid) {
    if (k >= 1 && k < std::min(models, total)) usable.push_back(k);
  }
  if (usable.empty()) usable.push_back(std::max(1, std::min(models, total) - 1));
  if (usable.size() == 1) return usable.front();

  const int folds = std::min(cv_folds, models);
  std::vector<int> fold_of(static_cast<std::size_t>(models));
  {
    std::vector<int> order(static_cast<std::size_t>(models));
    for (int i = 0; i < models; ++i) order[static_cast<std::size_t>(i)] = i;
    Rng(cv_seed).shuffle(order);
    for (int i = 0; i < models; ++i) {
      fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i % folds;
    }
  }
  const VectorXd means = row_means(source);
  std::vector<char> in_core(static_cast<std::size_t>(total), 0);
  for (const int c : core) in_core[static_cast<std::size_t>(c)] = 1;

  int best_k = usable.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (const int k : usable) {
    double err = 0.0;
    for (int f = 0; f < folds; ++f) {
      MatrixXd values = source;
      numerics::MissingMask missing =
          numerics::MissingMask::Constant(models, total, false);
      std::vector<int> held;
      for (int i = 0; i < models; ++i) {
        if (fold_of[static_cast<std::size_t>(i)] != f) continue;
        held.push_back(i);
        for (int j = 0; j < total; ++j) {
          if (!in_core[static_cast<std::size_t>(j)]) missing(i, j) = true;
        }
      }
      if (held.empty()) continue;
      const auto result = numerics::pca_impute(values, missing, k, max_iter, tol);
      for (const int i : held) {
        err += std::abs(result.completed.row(i).mean() - means(i));
      }
    }
    err /= static_cast<double>(models);
    if (err < best_err) {
      best_err = err;
      best_k = k;
    }
  }
  return best_k;
}

EstimatorPtr fit_pca(const MatrixXd& source, CoreSet core, const std::vector<int>& grid,
                     int cv_folds, std::uint64_t cv_seed, int max_iter, double tol) {
  check_core(core, source.cols());
  const int k = pca_select_components(source, core.indices, grid, cv_folds, cv_seed,
                                      max_iter, tol);
  return std::make_unique<PcaEstimator>(std::move(core), source, k, max_iter, tol);
}

EstimatorPtr fit_pca(const MatrixXd& source, int n, std::uint64_t seed,
                     const std::vector<int>& grid, int cv_folds, int max_iter, double tol) {
  return fit_pca(source, sample_core(static_cast<int>(source.cols()), n, seed), grid,
                 cv_folds, derive_seed(seed, "pca-cv"), max_iter, tol);
}

EstimatorPtr fit_aipw(const MatrixXd& source, CoreSet core, double lambda) {
  check_core(core, source.cols());
  if (source.rows() < 1) throw Error("too-few-samples", "aipw needs >= 1 source model");
  return std::make_unique<AipwEstimator>(std::move(core), source.transpose(), lambda);
}

EstimatorPtr fit_aipw(const MatrixXd& source, int n, std::uint64_t seed, double lambda) {
  return fit_aipw(source, sample_core(static_cast<int>(source.cols()), n, seed), lambda);
}

bool uses_random_core(MethodId id) {
  switch (id) {
    case MethodId::random_sampling:
    case MethodId::random_sampling_learn:
    case MethodId::pca:
    case MethodId::aipw:
      return true;
    default:
      return false;
  }
}

bool requires_binary(MethodId id) {
  return id == MethodId::p_irt || id == MethodId::gp_irt;
}

EstimatorPtr fit_estimator(const MethodConfig& config, const MatrixXd& source, int n,
                           std::uint64_t seed, const std::vector<int>* shared_core,
                           bool binary) {
  const auto& h = config.hyper;
  if (requires_binary(config.method_id) && !binary) {
    throw Error("requires-binary", "method needs a binary benchmark");
  }
  auto core_or_sample = [&]() -> CoreSet {
    if (shared_core != nullptr) return make_core(*shared_core);
    return sample_core(static_cast<int>(source.cols()), n, seed);
  };
  switch (config.method_id) {
    case MethodId::random_sampling:
      return fit_random_sampling(source, core_or_sample());
    case MethodId::random_sampling_learn:
      return fit_random_sampling_learn(source, core_or_sample(), h.ridge_lambda);
    case MethodId::random_search_learn:
      return fit_random_search_learn(source, n, seed, h.search_iterations, h.cv_folds,
                                     h.ridge_lambda);
    case MethodId::lasso:
      return fit_lasso(source, n, h.lasso);
    case MethodId::double_optimize:
      return fit_double_optimize(source, n, seed, h.optimizer);
    case MethodId::anchor_points_weighted:
      return fit_anchor_weighted(source, n, seed, h.clustering);
    case MethodId::anchor_points_predictor:
      return fit_anchor_predictor(source, n, seed, h.clustering, h.anchor_ridge_lambda);
    case MethodId::p_irt:
      if (h.irt_random_core) return fit_p_irt(source, core_or_sample(), h.irt);
      return fit_p_irt(source, n, seed, h.irt, h.clustering);
    case MethodId::gp_irt:
      return fit_gp_irt(source, n, seed, h.gp_irt_lambda, h.irt, h.clustering);
    case MethodId::pca:
      return fit_pca(source, core_or_sample(), h.pca_component_grid, h.pca_cv_folds,
                     derive_seed(seed, "pca-cv"), h.pca_max_iter, h.pca_tol);
    case MethodId::aipw:
      return fit_aipw(source, core_or_sample(), h.aipw_ridge_lambda);
  }
  throw Error("unknown-method", "unrecognized method id");
}

}  // namespace benchpred
