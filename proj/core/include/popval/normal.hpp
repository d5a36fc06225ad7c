#pragma once

#include <cstdint>

#include "popval/discrete.hpp"
#include "popval/report.hpp"

namespace popval {

/// Two-sample summary for the known-variance Z setting: observed mean
/// difference theta_hat = ybar1 - ybar2, per-observation variance sigma2,
/// and per-group sample size n. Var(theta_hat) = 2 sigma2 / n.
struct TwoSampleSummary {
  double theta_hat;
  double sigma2;
  std::int64_t n;

  TwoSampleSummary(double theta_hat_, double sigma2_, std::int64_t n_)
      : theta_hat(theta_hat_), sigma2(sigma2_), n(n_) {
    if (!std::isfinite(theta_hat)) throw domain_error("theta_hat must be finite");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
      throw domain_error("sigma2 must be positive and finite");
    if (n < 1) throw domain_error("per-group sample size n must be >= 1");
  }
};

/// Prior on the mean difference: either improper flat or N(mu0, sigma0_sq).
struct NormalPrior {
  static NormalPrior flat() { return NormalPrior(); }

  static NormalPrior normal(double mu0, double sigma0_sq) {
    if (!std::isfinite(mu0)) throw domain_error("prior mean must be finite");
    if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq))
      throw domain_error("prior variance must be positive and finite");
    NormalPrior p;
    p.is_flat = false;
    p.mu0 = mu0;
    p.sigma0_sq = sigma0_sq;
    return p;
  }

  bool is_flat = true;
  double mu0 = 0.0;
  double sigma0_sq = 0.0;

 private:
  NormalPrior() = default;
};

struct NormalPosterior {
  double mu;
  double sigma_sq;
};

/// z = theta_hat / sqrt(2 sigma2 / n).
double z_statistic(const TwoSampleSummary& s);

/// One-sided p-values 1 - Phi(z) / Phi(z) and the two-sided p-value
/// 2[1 - max{Phi(z), Phi(-z)}].
TestReport z_pvalues(const TwoSampleSummary& s);

/// Conjugate posterior of theta. Flat prior: N(theta_hat, 2 sigma2/n).
/// N(mu0, sigma0_sq) prior: precision-weighted shrinkage of theta_hat
/// toward mu0.
NormalPosterior normal_posterior(const TwoSampleSummary& s,
                                 const NormalPrior& prior);

/// Posterior probabilities of {theta <= 0} and {theta >= 0} plus the
/// two-sided PoP. Under the flat prior pop_le coincides with the
/// one-sided p-value exactly (identical floating-point path).
PosteriorReport normal_pop(const TwoSampleSummary& s, const NormalPrior& prior);

/// Flat-prior posterior Pr(theta <= theta0 | y) (Tail::lower) or
/// Pr(theta >= theta0 | y) for a binomial proportion under the plug-in
/// normal approximation; reproduces the matching normal-approximation
/// p-value by the normal reflection identity.
Probability birth_example_pop(const BinomialSample& data, const NullPoint& null,
                              Tail direction);

}  // namespace popval
