#pragma once

#include <cstdint>

#include "popval/report.hpp"

namespace popval {

/// Success count y out of n Bernoulli trials.
struct BinomialSample {
  std::int64_t y;
  std::int64_t n;

  BinomialSample(std::int64_t y_, std::int64_t n_) : y(y_), n(n_) {
    if (n < 1) throw domain_error("binomial sample requires n >= 1");
    if (y < 0 || y > n) throw domain_error("binomial sample requires 0 <= y <= n");
  }

  double mean() const { return static_cast<double>(y) / static_cast<double>(n); }
};

/// Hyperparameters of a Beta(alpha, beta) prior.
struct BetaParams {
  double alpha;
  double beta;

  BetaParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    if (!(alpha > 0.0) || !std::isfinite(alpha) || !(beta > 0.0) || !std::isfinite(beta))
      throw domain_error("beta prior requires alpha > 0, beta > 0");
  }
};

/// Null value theta0 of the success probability, strictly inside (0, 1).
struct NullPoint {
  double theta0;

  explicit NullPoint(double theta0_) : theta0(theta0_) {
    if (!(theta0 > 0.0 && theta0 < 1.0))
      throw domain_error("null point requires 0 < theta0 < 1");
  }
};

enum class Tail { lower, upper };
enum class PvalueMethod { exact, normal_approx };

/// Exact binomial tail p-value. Upper: Pr(Y >= y | theta0); lower:
/// Pr(Y <= y | theta0). Evaluated through the incomplete-beta identity
/// Pr(Y >= y) = I_theta0(y, n-y+1), so no factorial overflow at any n.
Probability binom_exact_pvalue(const BinomialSample& data, const NullPoint& null,
                               Tail direction);

/// Normal-approximation p-value with plug-in variance
/// s2 = ybar(1-ybar)/n. Requires 0 < y < n so the variance is positive.
Probability binom_normal_approx_pvalue(const BinomialSample& data,
                                       const NullPoint& null, Tail direction);

/// Upper-tail p-value when sampling is negative binomial with r = n - y
/// observed failures: Pr(Y >= y) = I_theta0(y, n - y). Requires
/// 1 <= y <= n-1 so r is a valid failure count.
Probability negbinom_pvalue(const BinomialSample& data, const NullPoint& null);

/// Conjugate Beta posterior report: pop_le = I_theta0(y+alpha, n-y+beta),
/// the posterior mass of {theta <= theta0}.
PosteriorReport beta_posterior_pop(const BinomialSample& data,
                                   const BetaParams& prior,
                                   const NullPoint& null);

/// Posterior probability of the point null when the prior mixes a point
/// mass at theta0 with a uniform density elsewhere (equal prior odds),
/// under the plug-in normal approximation. The competing marginal
/// integral has the closed form sqrt(2 pi s2) [Phi(1;ybar,s2) - Phi(0;ybar,s2)].
Probability lindley_point_mass_pop(const BinomialSample& data,
                                   const NullPoint& null);

/// Two-sided p-value: twice the smaller tail, capped at 1.
Probability two_sided_pvalue_discrete(const BinomialSample& data,
                                      const NullPoint& null,
                                      PvalueMethod method);

}  // namespace popval
