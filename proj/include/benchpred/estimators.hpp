#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "benchpred/numerics/irt.hpp"
#include "benchpred/numerics/kmedoids.hpp"
#include "benchpred/numerics/lasso.hpp"
#include "benchpred/numerics/masked_linear.hpp"
#include "benchpred/score_matrix.hpp"

namespace benchpred {

/// Per-method hyperparameters with the documented defaults. Unused fields are
/// simply ignored by methods that do not consume them.
struct MethodHyper {
  double ridge_lambda = 1.0;          // random-sampling-learn / random-search-learn
  int search_iterations = 10000;      // random-search-learn candidate subsets
  int cv_folds = 5;
  numerics::LassoConfig lasso;
  numerics::MaskedLinearConfig optimizer;
  numerics::KMedoidsConfig clustering;
  double anchor_ridge_lambda = 1e-3;  // anchor-points-predictor
  numerics::IrtConfig irt;
  bool irt_random_core = false;       // p-irt/gp-irt on the shared random core
  double gp_irt_lambda = 0.5;         // mix toward anchor-points-weighted
  std::vector<int> pca_component_grid = {2, 5, 10, 20};
  int pca_cv_folds = 5;
  int pca_max_iter = 100;
  double pca_tol = 1e-4;
  double aipw_ridge_lambda = 1.0;
};

struct MethodConfig {
  MethodId method_id = MethodId::random_sampling;
  MethodHyper hyper;
};

/// A fitted benchmark-score estimator. estimate() sees nothing but the target
/// model's scores at the core-set columns, in core order; everything else the
/// method needs was captured from the source matrix at fit time.
class FittedEstimator {
 public:
  FittedEstimator(MethodId id, CoreSet core) : method_(id), core_(std::move(core)) {}
  virtual ~FittedEstimator() = default;

  MethodId method() const { return method_; }
  const CoreSet& core_set() const { return core_; }

  double estimate(const Eigen::VectorXd& core_scores) const;

 protected:
  virtual double estimate_impl(const Eigen::VectorXd& core_scores) const = 0;

 private:
  MethodId method_;
  CoreSet core_;
};

using EstimatorPtr = std::unique_ptr<FittedEstimator>;

// --- fits; the CoreSet overloads accept a caller-chosen (shared) random core ---

EstimatorPtr fit_random_sampling(const Eigen::MatrixXd& source, int n, std::uint64_t seed);
EstimatorPtr fit_random_sampling(const Eigen::MatrixXd& source, CoreSet core);

EstimatorPtr fit_random_sampling_learn(const Eigen::MatrixXd& source, int n,
                                       std::uint64_t seed, double lambda = 1.0);
EstimatorPtr fit_random_sampling_learn(const Eigen::MatrixXd& source, CoreSet core,
                                       double lambda = 1.0);

EstimatorPtr fit_random_search_learn(const Eigen::MatrixXd& source, int n,
                                     std::uint64_t seed, int iterations = 10000,
                                     int folds = 5, double lambda = 1.0);

EstimatorPtr fit_lasso(const Eigen::MatrixXd& source, int n,
                       const numerics::LassoConfig& config = {});

EstimatorPtr fit_double_optimize(const Eigen::MatrixXd& source, int n, std::uint64_t seed,
                                 const numerics::MaskedLinearConfig& config = {});

EstimatorPtr fit_anchor_weighted(const Eigen::MatrixXd& source, int n, std::uint64_t seed,
                                 const numerics::KMedoidsConfig& config = {});

EstimatorPtr fit_anchor_predictor(const Eigen::MatrixXd& source, int n, std::uint64_t seed,
                                  const numerics::KMedoidsConfig& config = {},
                                  double lambda = 1e-3);

EstimatorPtr fit_p_irt(const Eigen::MatrixXd& source, int n, std::uint64_t seed,
                       const numerics::IrtConfig& irt_config = {},
                       const numerics::KMedoidsConfig& clustering = {});
EstimatorPtr fit_p_irt(const Eigen::MatrixXd& source, CoreSet core,
                       const numerics::IrtConfig& irt_config = {});

EstimatorPtr fit_gp_irt(const Eigen::MatrixXd& source, int n, std::uint64_t seed,
                        double lambda_mix = 0.5,
                        const numerics::IrtConfig& irt_config = {},
                        const numerics::KMedoidsConfig& clustering = {});

EstimatorPtr fit_pca(const Eigen::MatrixXd& source, int n, std::uint64_t seed,
                     const std::vector<int>& component_grid = {2, 5, 10, 20},
                     int cv_folds = 5, int max_iter = 100, double tol = 1e-4);
EstimatorPtr fit_pca(const Eigen::MatrixXd& source, CoreSet core,
                     const std::vector<int>& component_grid = {2, 5, 10, 20},
                     int cv_folds = 5, std::uint64_t cv_seed = 0, int max_iter = 100,
                     double tol = 1e-4);

EstimatorPtr fit_aipw(const Eigen::MatrixXd& source, int n, std::uint64_t seed,
                      double lambda = 1.0);
EstimatorPtr fit_aipw(const Eigen::MatrixXd& source, CoreSet core, double lambda = 1.0);

/// The debiasing combination AIPW applies on top of its proxy predictions.
double aipw_combine(double core_mean, double proxy_core_mean, double proxy_offcore_mean,
                    int n, int total);

/// Dispatch by MethodConfig. `shared_core` (when non-null) supplies the
/// trial's shared random core set to the methods that sample one uniformly;
/// methods that select their own columns ignore it. `binary` gates the
/// IRT-family methods.
EstimatorPtr fit_estimator(const MethodConfig& config, const Eigen::MatrixXd& source,
                           int n, std::uint64_t seed,
                           const std::vector<int>* shared_core, bool binary);

/// True for methods whose core set is one uniform random sample.
bool uses_random_core(MethodId id);

/// True for methods defined only on 0/1 score matrices.
bool requires_binary(MethodId id);

/// Chooses the PCA component count by masking off-core entries of held-out
/// source rows and comparing imputed means against the truth. Exposed for
/// tests; ties resolve toward the smaller component count.
int pca_select_components(const Eigen::MatrixXd& source, const std::vector<int>& core,
                          const std::vector<int>& grid, int cv_folds,
                          std::uint64_t cv_seed, int max_iter, double tol);

}  // namespace benchpred
