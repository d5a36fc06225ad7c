#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "popval/discrete.hpp"

using namespace popval;

TEST_SUITE_BEGIN("discrete");

namespace {
const BinomialSample kBirth{28298, 56099};
const BinomialSample kCoin{9, 12};
const NullPoint kHalf{0.5};
}  // namespace

TEST_CASE("type invariants") {
  CHECK_THROWS_AS(BinomialSample(5, 4), domain_error);
  CHECK_THROWS_AS(BinomialSample(-1, 4), domain_error);
  CHECK_THROWS_AS(BinomialSample(0, 0), domain_error);
  CHECK_THROWS_AS(BetaParams(0.0, 1.0), domain_error);
  CHECK_THROWS_AS(BetaParams(1.0, -2.0), domain_error);
  CHECK_THROWS_AS(NullPoint(0.0), domain_error);
  CHECK_THROWS_AS(NullPoint(1.0), domain_error);
}

TEST_CASE("exact binomial p-value") {
  // 12-digit reference from exact integer summation of the 56099-trial tail
  CHECK(double(binom_exact_pvalue(kBirth, kHalf, Tail::upper)) ==
        doctest::Approx(0.0181236290396).epsilon(1e-10));
  CHECK(double(binom_exact_pvalue(BinomialSample(0, 10), kHalf, Tail::upper)) == 1.0);
  CHECK(double(binom_exact_pvalue(BinomialSample(10, 10), kHalf, Tail::lower)) == 1.0);
  // sum_{k=7}^{10} C(10,k) 0.3^k 0.7^(10-k) = 105920784 / 10^10 exactly
  CHECK(double(binom_exact_pvalue(BinomialSample(7, 10), NullPoint(0.3),
                                  Tail::upper)) ==
        doctest::Approx(0.0105920784).epsilon(1e-13));
  CHECK(double(binom_exact_pvalue(kCoin, kHalf, Tail::upper)) ==
        doctest::Approx(299.0 / 4096.0).epsilon(1e-14));
}

TEST_CASE("exact tails against log-space summation") {
  std::mt19937_64 engine(61);
  std::uniform_int_distribution<std::int64_t> un(1, 300);
  std::uniform_real_distribution<double> utheta(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    std::int64_t n = un(engine);
    std::int64_t y = static_cast<std::int64_t>(engine() % static_cast<std::uint64_t>(n + 1));
    NullPoint null(utheta(engine));
    BinomialSample data(y, n);
    CHECK(std::abs(double(binom_exact_pvalue(data, null, Tail::upper)) -
                   oracles::binom_upper_logsum(y, n, null.theta0)) < 1e-12);
    CHECK(std::abs(double(binom_exact_pvalue(data, null, Tail::lower)) -
                   oracles::binom_lower_logsum(y, n, null.theta0)) < 1e-12);
  }
}

TEST_CASE("complement: upper + lower = 1 + pmf(y)") {
  std::mt19937_64 engine(67);
  std::uniform_int_distribution<std::int64_t> un(1, 400);
  std::uniform_real_distribution<double> utheta(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    std::int64_t n = un(engine);
    std::int64_t y = static_cast<std::int64_t>(engine() % static_cast<std::uint64_t>(n + 1));
    NullPoint null(utheta(engine));
    BinomialSample data(y, n);
    double upper = binom_exact_pvalue(data, null, Tail::upper);
    double lower = binom_exact_pvalue(data, null, Tail::lower);
    CHECK(std::abs(upper + lower - 1.0 - oracles::binom_pmf(y, n, null.theta0)) <
          1e-12);
  }
}

TEST_CASE("normal-approximation p-value") {
  CHECK(double(binom_normal_approx_pvalue(kBirth, kHalf, Tail::upper)) ==
        doctest::Approx(0.0179332931157).epsilon(1e-9));
  CHECK(double(binom_normal_approx_pvalue(kBirth, kHalf, Tail::lower)) ==
        doctest::Approx(0.982066706884).epsilon(1e-9));
  // ybar exactly on the null: z = 0 on both sides
  CHECK(double(binom_normal_approx_pvalue(BinomialSample(5, 10), kHalf,
                                          Tail::upper)) == 0.5);
  CHECK_THROWS_AS(binom_normal_approx_pvalue(BinomialSample(0, 10), kHalf,
                                             Tail::upper),
                  domain_error);
  CHECK_THROWS_AS(binom_normal_approx_pvalue(BinomialSample(10, 10), kHalf,
                                             Tail::lower),
                  domain_error);
}

TEST_CASE("negative binomial p-value") {
  CHECK(double(negbinom_pvalue(kCoin, kHalf)) ==
        doctest::Approx(67.0 / 2048.0).epsilon(1e-14));
  CHECK(double(negbinom_pvalue(BinomialSample(1, 2), kHalf)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // truncated series; the sum is the terminating decimal 0.0059244544
  double series = oracles::negbinom_upper_series(9, 3, 0.4);
  double lib = negbinom_pvalue(kCoin, NullPoint(0.4));
  CHECK(std::abs(lib - series) < 1e-13);
  CHECK(lib == doctest::Approx(0.0059244544).epsilon(1e-12));
  CHECK_THROWS_AS(negbinom_pvalue(BinomialSample(0, 5), kHalf), domain_error);
  CHECK_THROWS_AS(negbinom_pvalue(BinomialSample(5, 5), kHalf), domain_error);
}

TEST_CASE("negative binomial tail equals the incomplete beta of the generic null") {
  std::mt19937_64 engine(71);
  std::uniform_int_distribution<std::int64_t> un(2, 200);
  std::uniform_real_distribution<double> utheta(0.1, 0.9);
  for (int i = 0; i < 60; ++i) {
    std::int64_t n = un(engine);
    std::int64_t y = 1 + static_cast<std::int64_t>(
                             engine() % static_cast<std::uint64_t>(n - 1));
    double theta = utheta(engine);
    double lib = negbinom_pvalue(BinomialSample(y, n), NullPoint(theta));
    double ref = oracles::negbinom_upper_series(y, n - y, theta);
    CHECK(std::abs(lib - ref) < 1e-12);
  }
}

TEST_CASE("beta posterior report") {
  PosteriorReport rep = beta_posterior_pop(kBirth, BetaParams(1.0, 1.0), kHalf);
  CHECK(double(rep.pop_le) == doctest::Approx(0.01793728477).epsilon(1e-9));
  CHECK(double(rep.pop_ge) == 1.0 - double(rep.pop_le));
  CHECK(double(rep.pop_two_sided) ==
        2.0 * std::min(double(rep.pop_le), double(rep.pop_ge)));
  CHECK(rep.bayes_factor ==
        doctest::Approx(double(rep.pop_le) / (1.0 - double(rep.pop_le))));

  CHECK(double(beta_posterior_pop(kCoin, BetaParams(1e-6, 1e-6), kHalf).pop_le) ==
        doctest::Approx(0.03271485719).epsilon(1e-8));
  // symmetric data with a symmetric prior sit exactly on the null
  CHECK(double(beta_posterior_pop(BinomialSample(6, 12), BetaParams(2.5, 2.5),
                                  kHalf).pop_le) ==
        doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("posterior mass grows with prior concentration when data exceed the null") {
  // y/n = 0.75 > 0.5: the symmetric prior pulls the posterior toward 1/2
  double prev = 0.0;
  for (double ab : {1e-6, 1e-4, 0.01, 0.1, 0.5, 1.0, 1.5, 2.0}) {
    double pop = beta_posterior_pop(kCoin, BetaParams(ab, ab), kHalf).pop_le;
    CHECK(pop > prev);
    prev = pop;
  }
}

TEST_CASE("lindley point-mass posterior") {
  double v = lindley_point_mass_pop(kBirth, kHalf);
  CHECK(v == doctest::Approx(0.9543473582).epsilon(1e-7));

  // cross-check the closed-form marginal against quadrature
  double ybar = kBirth.mean();
  double s2 = ybar * (1.0 - ybar) / static_cast<double>(kBirth.n);
  double point = std::exp(-(ybar - 0.5) * (ybar - 0.5) / (2.0 * s2));
  double integral = oracles::integrate(
      [&](double t) { return std::exp(-(ybar - t) * (ybar - t) / (2.0 * s2)); },
      0.0, 1.0, 1e-12);
  CHECK(std::abs(v - point / (point + integral)) < 1e-8);

  // data sitting exactly on the null: the atom dominates at large n
  double centered = lindley_point_mass_pop(BinomialSample(5000, 10000), kHalf);
  CHECK(centered > 0.9);
  CHECK_THROWS_AS(lindley_point_mass_pop(BinomialSample(0, 5), kHalf), domain_error);
}

TEST_CASE("two-sided p-values") {
  CHECK(double(two_sided_pvalue_discrete(kBirth, kHalf,
                                         PvalueMethod::normal_approx)) ==
        doctest::Approx(0.0358665862315).epsilon(1e-9));
  // both tails cover at least half the mass at ybar = theta0
  CHECK(double(two_sided_pvalue_discrete(BinomialSample(6, 12), kHalf,
                                         PvalueMethod::normal_approx)) == 1.0);
  double expected =
      2.0 * std::min(oracles::binom_upper_logsum(9, 12, 0.5),
                     oracles::binom_lower_logsum(9, 12, 0.5));
  CHECK(double(two_sided_pvalue_discrete(kCoin, kHalf, PvalueMethod::exact)) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("two-sided equals twice the smaller tail, capped") {
  std::mt19937_64 engine(73);
  std::uniform_int_distribution<std::int64_t> un(2, 300);
  std::uniform_real_distribution<double> utheta(0.1, 0.9);
  for (int i = 0; i < 100; ++i) {
    std::int64_t n = un(engine);
    std::int64_t y = static_cast<std::int64_t>(engine() % static_cast<std::uint64_t>(n + 1));
    NullPoint null(utheta(engine));
    BinomialSample data(y, n);
    double upper = binom_exact_pvalue(data, null, Tail::upper);
    double lower = binom_exact_pvalue(data, null, Tail::lower);
    double two = two_sided_pvalue_discrete(data, null, PvalueMethod::exact);
    CHECK(two == std::min(1.0, 2.0 * std::min(upper, lower)));
  }
}

TEST_CASE("negative binomial p-value meets the vanishing-prior posterior") {
  // desk-scale slice of the equivalence; the full n <= 200 sweep is in
  // the acceptance suite
  BetaParams prior(1e-6, 1e-6);
  for (std::int64_t n : {2, 3, 7, 20, 41, 60}) {
    for (std::int64_t y = 1; y < n; ++y) {
      BinomialSample data(y, n);
      double p_nb = negbinom_pvalue(data, kHalf);
      double pop = beta_posterior_pop(data, prior, kHalf).pop_le;
      CHECK(std::abs(p_nb - pop) < 1e-6);
    }
  }
}

TEST_SUITE_END();
