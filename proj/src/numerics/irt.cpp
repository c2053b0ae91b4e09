#include "benchpred/numerics/irt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "benchpred/error.hpp"
#include "benchpred/score_matrix.hpp"

namespace benchpred::numerics {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow.
double log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double clipped_logit(double p, double eps) {
  const double q = std::clamp(p, eps, 1.0 - eps);
  return std::log(q / (1.0 - q));
}

struct Params {
  Eigen::VectorXd theta;   // abilities
  Eigen::VectorXd b;       // difficulties
  Eigen::VectorXd alpha;   // log discriminations
};

double log_posterior(const Eigen::MatrixXd& s, const Params& p, const IrtConfig& cfg) {
  const auto m = s.rows();
  const auto n = s.cols();
  const Eigen::VectorXd a = p.alpha.array().exp();
  double ll = 0.0;
  for (Eigen::Index z = 0; z < n; ++z) {
    const double az = a(z);
    const double bz = p.b(z);
    for (Eigen::Index f = 0; f < m; ++f) {
      const double x = az * p.theta(f) - bz;
      ll += s(f, z) * x - log1pexp(x);
    }
  }
  ll -= p.theta.squaredNorm() / (2.0 * cfg.ability_prior_sd * cfg.ability_prior_sd);
  ll -= p.b.squaredNorm() / (2.0 * cfg.difficulty_prior_sd * cfg.difficulty_prior_sd);
  ll -= p.alpha.squaredNorm() / (2.0 * cfg.log_disc_prior_sd * cfg.log_disc_prior_sd);
  return ll;
}

constexpr double kMaxStep = 1.0;
constexpr int kMaxHalvings = 30;

}  // namespace

double IrtModel::probability(double ability, int item) const {
  return sigmoid(discriminations(item) * ability - difficulties(item));
}

double IrtModel::mean_probability(double ability, const std::vector<int>& items) const {
  if (items.empty()) throw Error("empty-subset", "mean probability over no items");
  double sum = 0.0;
  for (const int z : items) sum += probability(ability, z);
  return sum / static_cast<double>(items.size());
}

IrtModel irt_fit(const Eigen::MatrixXd& s, const IrtConfig& cfg) {
  const auto m = s.rows();
  const auto n = s.cols();
  if (m < 2 || n < 2) throw Error("too-few-samples", "need >= 2 models and >= 2 items");
  if (!all_binary(s)) throw Error("requires-binary", "IRT fitting needs 0/1 scores");

  const double var_theta = cfg.ability_prior_sd * cfg.ability_prior_sd;
  const double var_b = cfg.difficulty_prior_sd * cfg.difficulty_prior_sd;
  const double var_alpha = cfg.log_disc_prior_sd * cfg.log_disc_prior_sd;

  Params p;
  p.theta.resize(m);
  p.b.resize(n);
  p.alpha = Eigen::VectorXd::Zero(n);

  // Logit-of-rate initialization, abilities standardized onto the prior scale.
  const double eps_row = 1.0 / (2.0 * static_cast<double>(n));
  for (Eigen::Index f = 0; f < m; ++f) {
    p.theta(f) = clipped_logit(s.row(f).mean(), eps_row);
  }
  const double t_mean = p.theta.mean();
  const double t_sd = std::sqrt((p.theta.array() - t_mean).square().mean());
  p.theta = t_sd > 0.0 ? ((p.theta.array() - t_mean) / t_sd).matrix().eval()
                       : Eigen::VectorXd::Zero(m);
  const double eps_col = 1.0 / (2.0 * static_cast<double>(m));
  for (Eigen::Index z = 0; z < n; ++z) {
    p.b(z) = std::clamp(-clipped_logit(s.col(z).mean(), eps_col), -3.0, 3.0);
  }

  double post = log_posterior(s, p, cfg);
  int epoch = 0;
  bool converged = false;
  std::vector<double> trace;

  Eigen::VectorXd grad_b(n), grad_alpha(n), hess_b(n), hess_alpha(n);
  Eigen::VectorXd grad_t(m), hess_t(m);

  for (epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const double post_before_epoch = post;

    // --- item block ---
    {
      const Eigen::VectorXd a = p.alpha.array().exp();
      grad_b.setZero();
      grad_alpha.setZero();
      hess_b.setZero();
      hess_alpha.setZero();
      for (Eigen::Index z = 0; z < n; ++z) {
        double gb = 0.0, ga = 0.0, hb = 0.0, ha = 0.0;
        for (Eigen::Index f = 0; f < m; ++f) {
          const double prob = sigmoid(a(z) * p.theta(f) - p.b(z));
          const double e = s(f, z) - prob;
          const double w = prob * (1.0 - prob);
          gb -= e;
          ga += p.theta(f) * e;
          hb += w;
          ha += p.theta(f) * p.theta(f) * w;
        }
        grad_b(z) = gb - p.b(z) / var_b;
        grad_alpha(z) = a(z) * ga - p.alpha(z) / var_alpha;
        hess_b(z) = hb + 1.0 / var_b;
        hess_alpha(z) = a(z) * a(z) * ha + 1.0 / var_alpha;
      }
      Eigen::VectorXd step_b = (grad_b.array() / hess_b.array())
                                   .cwiseMax(-kMaxStep).cwiseMin(kMaxStep);
      Eigen::VectorXd step_a = (grad_alpha.array() / hess_alpha.array())
                                   .cwiseMax(-kMaxStep).cwiseMin(kMaxStep);
      const Eigen::VectorXd b0 = p.b;
      const Eigen::VectorXd alpha0 = p.alpha;
      double scale = 1.0;
      for (int h = 0; h <= kMaxHalvings; ++h) {
        p.b = b0 + scale * step_b;
        p.alpha = alpha0 + scale * step_a;
        const double trial = log_posterior(s, p, cfg);
        if (trial >= post) {
          post = trial;
          break;
        }
        if (h == kMaxHalvings) {
          p.b = b0;
          p.alpha = alpha0;
        }
        scale *= 0.5;
      }
    }

    // --- ability block ---
    {
      const Eigen::VectorXd a = p.alpha.array().exp();
      grad_t.setZero();
      hess_t.setZero();
      for (Eigen::Index f = 0; f < m; ++f) {
        double gt = 0.0, ht = 0.0;
        for (Eigen::Index z = 0; z < n; ++z) {
          const double prob = sigmoid(a(z) * p.theta(f) - p.b(z));
          const double w = prob * (1.0 - prob);
          gt += a(z) * (s(f, z) - prob);
          ht += a(z) * a(z) * w;
        }
        grad_t(f) = gt - p.theta(f) / var_theta;
        hess_t(f) = ht + 1.0 / var_theta;
      }
      Eigen::VectorXd step_t = (grad_t.array() / hess_t.array())
                                   .cwiseMax(-kMaxStep).cwiseMin(kMaxStep);
      const Eigen::VectorXd theta0 = p.theta;
      double scale = 1.0;
      for (int h = 0; h <= kMaxHalvings; ++h) {
        p.theta = theta0 + scale * step_t;
        const double trial = log_posterior(s, p, cfg);
        if (trial >= post) {
          post = trial;
          break;
        }
        if (h == kMaxHalvings) p.theta = theta0;
        scale *= 0.5;
      }
    }

    trace.push_back(post);
    if (post - post_before_epoch < cfg.tol) {
      converged = true;
      break;
    }
  }

  IrtModel model;
  model.difficulties = p.b;
  model.discriminations = p.alpha.array().exp();
  model.abilities = p.theta;
  model.log_posterior = post;
  model.epochs = std::min(epoch, cfg.max_epochs);
  model.converged = converged;
  model.posterior_trace = std::move(trace);
  return model;
}

double irt_ability(const IrtModel& model, const std::vector<int>& items,
                   const Eigen::VectorXd& responses) {
  if (static_cast<Eigen::Index>(items.size()) != responses.size()) {
    throw Error("length-mismatch", "responses must align with items");
  }
  for (Eigen::Index i = 0; i < responses.size(); ++i) {
    if (responses(i) != 0.0 && responses(i) != 1.0) {
      throw Error("requires-binary", "responses must be 0/1");
    }
  }
  double theta = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    double g = -theta;  // N(0,1) prior
    double h = 1.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const int z = items[i];
      const double a = model.discriminations(z);
      const double prob = sigmoid(a * theta - model.difficulties(z));
      g += a * (responses(static_cast<Eigen::Index>(i)) - prob);
      h += a * a * prob * (1.0 - prob);
    }
    const double step = std::clamp(g / h, -2.0, 2.0);
    theta += step;
    if (std::abs(step) < 1e-8) break;
  }
  return theta;
}

}  // namespace benchpred::numerics
