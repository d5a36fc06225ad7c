#include "popval/discrete.hpp"

#include <cmath>
#include <numbers>

#include "popval/special.hpp"

namespace popval {
namespace {

double plug_in_variance(const BinomialSample& data) {
  if (data.y == 0 || data.y == data.n)
    throw domain_error(
        "plug-in variance ybar(1-ybar)/n degenerates at y = 0 or y = n");
  double ybar = data.mean();
  return ybar * (1.0 - ybar) / static_cast<double>(data.n);
}

}  // namespace

Probability binom_exact_pvalue(const BinomialSample& data, const NullPoint& null,
                               Tail direction) {
  double y = static_cast<double>(data.y);
  double n = static_cast<double>(data.n);
  if (direction == Tail::upper) {
    if (data.y == 0) return 1.0;  // whole sample space
    return reg_inc_beta(null.theta0, y, n - y + 1.0);
  }
  if (data.y == data.n) return 1.0;
  // Pr(Y <= y) = 1 - Pr(Y >= y+1) = I_{1-theta0}(n-y, y+1)
  return reg_inc_beta(1.0 - null.theta0, n - y, y + 1.0);
}

Probability binom_normal_approx_pvalue(const BinomialSample& data,
                                       const NullPoint& null, Tail direction) {
  double s2 = plug_in_variance(data);
  double ybar = data.mean();
  if (direction == Tail::upper)
    return normal_sf_general(ybar, null.theta0, s2);
  return normal_cdf_general(ybar, null.theta0, s2);
}

Probability negbinom_pvalue(const BinomialSample& data, const NullPoint& null) {
  if (data.y == 0 || data.y == data.n)
    throw domain_error(
        "negative binomial failure count r = n - y requires 0 < y < n");
  double y = static_cast<double>(data.y);
  double r = static_cast<double>(data.n - data.y);
  return reg_inc_beta(null.theta0, y, r);
}

PosteriorReport beta_posterior_pop(const BinomialSample& data,
                                   const BetaParams& prior,
                                   const NullPoint& null) {
  double y = static_cast<double>(data.y);
  double n = static_cast<double>(data.n);
  double pop_le = reg_inc_beta(null.theta0, y + prior.alpha, n - y + prior.beta);
  return make_posterior_report(pop_le);
}

Probability lindley_point_mass_pop(const BinomialSample& data,
                                   const NullPoint& null) {
  double s2 = plug_in_variance(data);
  double s = std::sqrt(s2);
  double ybar = data.mean();
  double point_mass = std::exp(-(ybar - null.theta0) * (ybar - null.theta0) /
                               (2.0 * s2));
  // integral over [0,1] of exp{-(ybar - t)^2 / 2 s2} dt, closed form
  double diffuse = std::sqrt(2.0 * std::numbers::pi * s2) *
                   (normal_cdf((1.0 - ybar) / s) - normal_cdf((0.0 - ybar) / s));
  return point_mass / (point_mass + diffuse);
}

Probability two_sided_pvalue_discrete(const BinomialSample& data,
                                      const NullPoint& null,
                                      PvalueMethod method) {
  double upper, lower;
  if (method == PvalueMethod::exact) {
    upper = binom_exact_pvalue(data, null, Tail::upper);
    lower = binom_exact_pvalue(data, null, Tail::lower);
  } else {
    upper = binom_normal_approx_pvalue(data, null, Tail::upper);
    lower = binom_normal_approx_pvalue(data, null, Tail::lower);
  }
  return two_sided_from_tails(upper, lower);
}

}  // namespace popval
