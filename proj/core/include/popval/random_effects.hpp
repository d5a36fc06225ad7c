#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "popval/report.hpp"

namespace popval {

/// Truth and shape of a simulated random-intercept dataset:
/// y_ij = beta0 + beta1 x_ij + b_i + eps_ij, with b_i ~ N(0, tau^2),
/// eps_ij ~ N(0, sigma^2), x_ij ~ Unif(-1, 1), i = 1..n clusters of
/// size J.
struct LmmConfig {
  std::int64_t n;
  std::int64_t J;
  double beta0;
  double beta1;
  double tau;
  double sigma;
  std::uint64_t seed;

  LmmConfig(std::int64_t n_, std::int64_t J_, double beta0_, double beta1_,
            double tau_, double sigma_, std::uint64_t seed_)
      : n(n_), J(J_), beta0(beta0_), beta1(beta1_), tau(tau_), sigma(sigma_),
        seed(seed_) {
    if (n < 2 || J < 2) throw domain_error("lmm requires n >= 2, J >= 2");
    if (!(tau > 0.0) || !(sigma > 0.0))
      throw domain_error("lmm requires tau > 0, sigma > 0");
  }
};

/// n x J covariate and outcome matrices (row = cluster).
struct LmmData {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;

  std::int64_t clusters() const { return x.rows(); }
  std::int64_t cluster_size() const { return x.cols(); }
};

/// Maximum-likelihood fit. tau2_boundary marks fits where the
/// unconstrained variance-component optimum was negative and tau2_hat
/// was pinned at zero.
struct LmmFit {
  double beta0_hat;
  double beta1_hat;
  double tau2_hat;
  double sigma2_hat;
  double se_beta1;
  double loglik;
  bool tau2_boundary;
};

/// Null boundaries for the two one-sided tests: beta1 <= delta and
/// tau^2 <= xi.
struct HypothesisThresholds {
  double delta;
  double xi;

  HypothesisThresholds(double delta_, double xi_) : delta(delta_), xi(xi_) {
    if (!std::isfinite(delta)) throw domain_error("delta must be finite");
    if (!(xi > 0.0)) throw domain_error("xi must be positive");
  }
};

struct GibbsOptions {
  std::int64_t iters = 20000;
  std::int64_t burnin = 5000;
  std::uint64_t seed = 1;
  // weakly-informative inverse-gamma shape/rate on both variances
  double ig_shape = 0.001;
  double ig_rate = 0.001;
};

/// Posterior frequencies of {beta1 <= delta} and {tau^2 <= xi} with
/// batch-means Monte Carlo standard errors.
struct GibbsPop {
  Probability pop_beta1;
  Probability pop_tau2;
  double mcse_beta1;
  double mcse_tau2;
};

/// Simulate a dataset; deterministic given cfg.seed.
LmmData generate_lmm(const LmmConfig& cfg);

/// Marginal Gaussian log-likelihood with compound-symmetric per-cluster
/// covariance V = sigma2 I_J + tau2 11'. Rank-one Woodbury forms keep the
/// per-cluster cost O(J). tau2 = 0 is allowed.
double lmm_loglik(const LmmData& data, double beta0, double beta1, double tau2,
                  double sigma2);

/// ML fit: Nelder-Mead over (log tau2, log sigma2) on the profile
/// likelihood (GLS beta at each step), restarted from perturbed
/// method-of-moments starts; the tau2 = 0 boundary profile is evaluated
/// in closed form and wins when the interior search cannot beat it.
LmmFit fit_lmm_ml(const LmmData& data);

/// Wald test of beta1 <= delta: upper p = 1 - Phi((beta1_hat - delta)/se).
TestReport wald_test_beta1(const LmmFit& fit, double delta);

/// Wald test of tau^2 <= xi on the log scale. The statistic is
/// (log tau2_hat - log xi)/s with N s^2 = [2 sigma^4/(J(J-1)) +
/// 2(J tau^2 + sigma^2)^2/J] / tau^4 at plug-in estimates, N = n*J total
/// observations. At a tau2_hat = 0 boundary fit the statistic
/// degenerates to -inf and the upper p-value is reported as 1 (the
/// boundary flag lives on LmmFit).
TestReport wald_test_tau2(const LmmFit& fit, double xi, std::int64_t J,
                          std::int64_t N);

/// Post-burnin draws of the two tested quantities.
struct GibbsChain {
  std::vector<double> beta1;
  std::vector<double> tau2;
};

/// Run the Gibbs sampler and keep the post-burnin draws, so one chain can
/// serve a whole grid of thresholds. Flat priors on (beta0, beta1),
/// inverse-gamma on the variances; full conditionals are Gaussian for b
/// and beta and inverse-gamma for sigma2 and tau2. Deterministic given
/// opts.seed.
GibbsChain gibbs_chain(const LmmData& data, const GibbsOptions& opts);

/// Frequency of {draw <= threshold} with a batch-means Monte Carlo
/// standard error (32 batches).
std::pair<double, double> tail_frequency(const std::vector<double>& draws,
                                         double threshold);

/// Gibbs sampler posterior probabilities of the two null hypotheses.
GibbsPop gibbs_pop(const LmmData& data, const HypothesisThresholds& thresholds,
                   const GibbsOptions& opts);

}  // namespace popval
