#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "popval/errors.hpp"

namespace popval {

/// A probability: finite and inside [0, 1]. Validated on construction,
/// converts back to double implicitly so arithmetic stays natural.
class Probability {
 public:
  Probability(double value) : value_(value) {  // NOLINT(google-explicit-constructor)
    if (!(value >= 0.0 && value <= 1.0))
      throw domain_error("probability outside [0,1]: " + std::to_string(value));
  }

  operator double() const { return value_; }
  double value() const { return value_; }

 private:
  double value_;
};

/// Frequentist test summary: statistic plus the tail probabilities in
/// both directions and the two-sided p-value 2*min(upper, lower).
struct TestReport {
  double statistic;
  Probability p_upper;
  Probability p_lower;
  Probability p_two_sided;
};

/// Bayesian counterpart of TestReport. pop_le is the posterior mass of
/// the parameter at or below the null point; the posterior is continuous
/// so pop_ge = 1 - pop_le. The Bayes factor is the posterior odds of
/// the "le" hypothesis, pop_le / (1 - pop_le).
struct PosteriorReport {
  Probability pop_le;
  Probability pop_ge;
  Probability pop_two_sided;
  double bayes_factor;
};

inline double two_sided_from_tails(double upper, double lower) {
  double p = 2.0 * std::min(upper, lower);
  return p > 1.0 ? 1.0 : p;
}

inline PosteriorReport make_posterior_report(double pop_le) {
  double pop_ge = 1.0 - pop_le;
  double two_sided = two_sided_from_tails(pop_le, pop_ge);
  double bf = pop_le < 1.0 ? pop_le / (1.0 - pop_le)
                           : std::numeric_limits<double>::infinity();
  return PosteriorReport{pop_le, pop_ge, two_sided, bf};
}

}  // namespace popval
