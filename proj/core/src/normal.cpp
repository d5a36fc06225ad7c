#include "popval/normal.hpp"

#include <cmath>

#include "popval/special.hpp"

namespace popval {
namespace {

double sampling_variance(const TwoSampleSummary& s) {
  return 2.0 * s.sigma2 / static_cast<double>(s.n);
}

}  // namespace

double z_statistic(const TwoSampleSummary& s) {
  return s.theta_hat / std::sqrt(sampling_variance(s));
}

TestReport z_pvalues(const TwoSampleSummary& s) {
  double z = z_statistic(s);
  double upper = normal_sf(z);
  double lower = normal_cdf(z);
  return TestReport{z, upper, lower, two_sided_from_tails(upper, lower)};
}

NormalPosterior normal_posterior(const TwoSampleSummary& s,
                                 const NormalPrior& prior) {
  double v = sampling_variance(s);
  if (prior.is_flat) return NormalPosterior{s.theta_hat, v};
  double denom = prior.sigma0_sq + v;
  double mu = (s.theta_hat * prior.sigma0_sq + prior.mu0 * v) / denom;
  double var = prior.sigma0_sq * v / denom;
  return NormalPosterior{mu, var};
}

PosteriorReport normal_pop(const TwoSampleSummary& s, const NormalPrior& prior) {
  NormalPosterior post = normal_posterior(s, prior);
  double ratio = post.mu / std::sqrt(post.sigma_sq);
  // Pr(theta <= 0 | D) = Phi(-ratio); evaluated as the survival function
  // at +ratio so the flat-prior case hits the exact code path of
  // z_pvalues' upper tail.
  double pop_le = normal_sf(ratio);
  double pop_ge = normal_cdf(ratio);
  double two_sided = two_sided_from_tails(pop_le, pop_ge);
  double bf = pop_le < 1.0 ? pop_le / (1.0 - pop_le)
                           : std::numeric_limits<double>::infinity();
  return PosteriorReport{pop_le, pop_ge, two_sided, bf};
}

Probability birth_example_pop(const BinomialSample& data, const NullPoint& null,
                              Tail direction) {
  if (data.y == 0 || data.y == data.n)
    throw domain_error(
        "plug-in variance ybar(1-ybar)/n degenerates at y = 0 or y = n");
  double ybar = data.mean();
  double s2 = ybar * (1.0 - ybar) / static_cast<double>(data.n);
  // theta | y ~ N(ybar, s2) under a flat prior on the whole line; the
  // mass lost to truncation outside [0,1] is negligible at survey-scale
  // n (bounded by the normal tail beyond min(ybar, 1-ybar)/s).
  if (direction == Tail::lower)
    return normal_sf_general(ybar, null.theta0, s2);
  return normal_cdf_general(ybar, null.theta0, s2);
}

}  // namespace popval
