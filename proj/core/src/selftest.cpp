#include <array>
#include <cmath>

#include "popval/discrete.hpp"
#include "popval/experiments.hpp"
#include "popval/special.hpp"

namespace popval {
namespace {

const BinomialSample kBirth{28298, 56099};
const BinomialSample kCoin{9, 12};
const NullPoint kHalf{0.5};

void check(SelftestReport& report, const std::string& name, double observed,
           double expected, double tolerance, double perturbation) {
  observed += perturbation;
  bool pass = std::abs(observed - expected) <= tolerance;
  report.checks.push_back(GoldenCheck{name, expected, observed, tolerance, pass});
  report.all_pass = report.all_pass && pass;
}

}  // namespace

SelftestReport run_selftest(double perturbation) {
  SelftestReport report;
  report.all_pass = true;
  auto add = [&](const std::string& name, double observed, double expected,
                 double tol) {
    check(report, name, observed, expected, tol, perturbation);
  };

  add("binom_exact_upper(28298,56099,0.5)",
      binom_exact_pvalue(kBirth, kHalf, Tail::upper), 0.01812363, 1e-6);
  add("binom_normal_approx_upper(28298,56099,0.5)",
      binom_normal_approx_pvalue(kBirth, kHalf, Tail::upper), 0.01793329, 1e-6);
  add("binom_normal_approx_lower(28298,56099,0.5)",
      binom_normal_approx_pvalue(kBirth, kHalf, Tail::lower), 0.9820667, 1e-6);
  add("two_sided_normal_approx(28298,56099,0.5)",
      two_sided_pvalue_discrete(kBirth, kHalf, PvalueMethod::normal_approx),
      0.03586658, 1e-6);
  add("lindley_point_mass(28298,56099,0.5)",
      lindley_point_mass_pop(kBirth, kHalf), 0.9543474, 1e-6);
  add("beta_posterior(28298,56099,Beta(1,1),0.5)",
      beta_posterior_pop(kBirth, BetaParams(1.0, 1.0), kHalf).pop_le,
      0.01793728, 1e-6);
  add("binom_exact_upper(9,12,0.5)",
      binom_exact_pvalue(kCoin, kHalf, Tail::upper), 0.07299805, 1e-6);
  add("negbinom(9,12,0.5)", negbinom_pvalue(kCoin, kHalf), 0.03271484, 1e-6);

  const std::array<std::pair<double, double>, 7> table1{{{1.0, 0.01793728},
                                                         {0.1, 0.01793580},
                                                         {0.01, 0.01793565},
                                                         {0.001, 0.01793564},
                                                         {0.0001, 0.01793563},
                                                         {0.00001, 0.01793563},
                                                         {0.000001, 0.01793563}}};
  for (auto [ab, expected] : table1) {
    add("table1 alpha=beta=" + format_double(ab),
        beta_posterior_pop(kBirth, BetaParams(ab, ab), kHalf).pop_le, expected,
        5e-9);
  }

  const std::array<std::pair<double, double>, 17> table2{{{2.0, 0.059235},
                                                          {1.5, 0.052752},
                                                          {1.0, 0.046143},
                                                          {0.9, 0.044809},
                                                          {0.8, 0.043471},
                                                          {0.7, 0.042131},
                                                          {0.6, 0.040789},
                                                          {0.5, 0.039445},
                                                          {0.4, 0.038099},
                                                          {0.3, 0.036753},
                                                          {0.2, 0.035406},
                                                          {0.1, 0.034060},
                                                          {0.01, 0.032849},
                                                          {0.001, 0.032728},
                                                          {0.0001, 0.032716},
                                                          {0.00001, 0.032715},
                                                          {0.000001, 0.032715}}};
  for (auto [ab, expected] : table2) {
    add("table2 alpha=beta=" + format_double(ab),
        beta_posterior_pop(kCoin, BetaParams(ab, ab), kHalf).pop_le, expected,
        5e-7);
  }

  return report;
}

}  // namespace popval
