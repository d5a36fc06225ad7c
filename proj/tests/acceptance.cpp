// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Budgets are wall-clock seconds; a criterion fails when its checks fail
// or its budget is exceeded.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "popval/discrete.hpp"
#include "popval/experiments.hpp"
#include "popval/normal.hpp"
#include "popval/special.hpp"

namespace {

int g_failures = 0;

void criterion(int number, const std::string& label, double budget_seconds,
               const std::function<std::pair<bool, std::string>()>& body) {
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    auto [passed, text] = body();
    ok = passed;
    detail = text;
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (elapsed > budget_seconds) {
    ok = false;
    detail += " [over budget]";
  }
  std::printf("[%s] criterion %2d: %s (%s; %.2fs, budget %.0fs)\n",
              ok ? "PASS" : "FAIL", number, label.c_str(), detail.c_str(),
              elapsed, budget_seconds);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double extra(const popval::ExperimentRecord& rec, const std::string& key) {
  for (const auto& [k, v] : rec.extras)
    if (k == key) return std::stod(v);
  throw std::runtime_error("missing extra " + key);
}

std::string param(const popval::ExperimentRecord& rec, const std::string& key) {
  for (const auto& [k, v] : rec.parameters)
    if (k == key) return v;
  throw std::runtime_error("missing parameter " + key);
}

constexpr std::uint64_t kMasterSeed = 20240501;

}  // namespace

int main() {
  using namespace popval;

  criterion(1, "golden closed-form scalars at 1e-6", 1.0, [] {
    SelftestReport rep = run_selftest();
    double worst = 0.0;
    bool ok = true;
    for (const auto& c : rep.checks) {
      if (c.name.rfind("table", 0) == 0) continue;  // tables are 2 and 3
      worst = std::max(worst, std::abs(c.observed - c.expected));
      ok = ok && c.pass;
    }
    std::ostringstream os;
    os << "max |obs-exp| = " << worst;
    return std::make_pair(ok && worst < 1e-6, os.str());
  });

  criterion(2, "all seven table-1 rows at 5e-9", 1.0, [] {
    SelftestReport rep = run_selftest();
    double worst = 0.0;
    bool ok = true;
    int rows = 0;
    for (const auto& c : rep.checks)
      if (c.name.rfind("table1", 0) == 0) {
        worst = std::max(worst, std::abs(c.observed - c.expected));
        ok = ok && c.pass;
        ++rows;
      }
    std::ostringstream os;
    os << rows << " rows, max gap " << worst;
    return std::make_pair(ok && rows == 7, os.str());
  });

  criterion(3, "all seventeen table-2 rows at 5e-7", 1.0, [] {
    SelftestReport rep = run_selftest();
    double worst = 0.0;
    bool ok = true;
    int rows = 0;
    for (const auto& c : rep.checks)
      if (c.name.rfind("table2", 0) == 0) {
        worst = std::max(worst, std::abs(c.observed - c.expected));
        ok = ok && c.pass;
        ++rows;
      }
    std::ostringstream os;
    os << rows << " rows, max gap " << worst;
    return std::make_pair(ok && rows == 17, os.str());
  });

  criterion(4, "negative-binomial p meets Beta(1e-6) PoP, every (y,n), n <= 200",
            30.0, [] {
    NullPoint half(0.5);
    BetaParams prior(1e-6, 1e-6);
    double worst = 0.0;
    for (std::int64_t n = 2; n <= 200; ++n) {
      for (std::int64_t y = 1; y <= n - 1; ++y) {
        BinomialSample data(y, n);
        double gap = std::abs(double(negbinom_pvalue(data, half)) -
                              double(beta_posterior_pop(data, prior, half).pop_le));
        worst = std::max(worst, gap);
      }
    }
    std::ostringstream os;
    os << "19900 pairs, max gap " << worst;
    return std::make_pair(worst < 1e-6, os.str());
  });

  criterion(5, "flat-prior PoP equals the one-sided p to 1e-15, 1e4 draws", 5.0,
            [] {
    std::mt19937_64 engine(kMasterSeed);
    std::uniform_real_distribution<double> utheta(-3.0, 3.0);
    std::uniform_real_distribution<double> usigma(0.01, 20.0);
    std::uniform_int_distribution<std::int64_t> un(1, 100000);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      TwoSampleSummary s(utheta(engine), usigma(engine), un(engine));
      TestReport test = z_pvalues(s);
      PosteriorReport pop = normal_pop(s, NormalPrior::flat());
      worst = std::max(worst, std::abs(double(pop.pop_le) - double(test.p_upper)));
      worst = std::max(worst,
                       std::abs(double(pop.pop_two_sided) - double(test.p_two_sided)));
    }
    std::ostringstream os;
    os << "max gap " << worst;
    return std::make_pair(worst < 1e-15, os.str());
  });

  criterion(6, "normal-prior PoP approaches the p-value as the prior flattens",
            5.0, [] {
    std::mt19937_64 engine(kMasterSeed + 1);
    std::uniform_real_distribution<double> utheta(-1.0, 1.0);
    std::uniform_real_distribution<double> usigma(0.1, 10.0);
    std::uniform_int_distribution<std::int64_t> un(10, 5000);
    std::uniform_real_distribution<double> umu0(-2.0, 2.0);
    bool monotone = true;
    double worst_final = 0.0;
    for (int i = 0; i < 2000; ++i) {
      TwoSampleSummary s(utheta(engine), usigma(engine), un(engine));
      double mu0 = umu0(engine);
      double p = z_pvalues(s).p_upper;
      double prev = std::numeric_limits<double>::infinity();
      for (double s0 : {1e2, 1e4, 1e6, 1e8}) {
        double gap =
            std::abs(double(normal_pop(s, NormalPrior::normal(mu0, s0)).pop_le) - p);
        if (gap > prev + 1e-15) monotone = false;
        prev = gap;
      }
      worst_final = std::max(worst_final, prev);
    }
    std::ostringstream os;
    os << "gap decreasing: " << (monotone ? "yes" : "NO") << ", max gap at 1e8 = "
       << worst_final;
    return std::make_pair(monotone && worst_final < 1e-6, os.str());
  });

  criterion(7, "bivariate-normal study: PoP tracks p within 1e-3 over 1000 reps",
            60.0, [] {
    auto records = run_fig_mvn(1000, kMasterSeed);
    double worst_one = 0.0, worst_two = 0.0;
    for (const auto& rec : records) {
      worst_one = std::max(worst_one, std::abs(*rec.p_value - *rec.pop));
      worst_two = std::max(worst_two, std::abs(extra(rec, "p_two_sided") -
                                               extra(rec, "pop_two_sided")));
    }
    std::ostringstream os;
    os << "max one-sided gap " << worst_one << ", two-sided " << worst_two;
    return std::make_pair(worst_one < 1e-3 && worst_two < 1e-3, os.str());
  });

  criterion(8, "random-effects study: Wald p vs Gibbs PoP medians in bounds",
            900.0, [] {
    auto records = run_fig_raneff(kMasterSeed);
    bool ok = true;
    std::ostringstream os;
    for (std::int64_t n : {100, 500}) {
      for (std::int64_t J : {2, 5}) {
        for (const std::string& test : {std::string("beta1"), std::string("tau2")}) {
          std::vector<double> gaps;
          for (const auto& rec : records) {
            if (param(rec, "n") != std::to_string(n) ||
                param(rec, "J") != std::to_string(J) || param(rec, "test") != test)
              continue;
            std::string status;
            for (const auto& [k, v] : rec.extras)
              if (k == "status") status = v;
            if (status != "ok") {
              ok = false;
              continue;
            }
            gaps.push_back(std::abs(*rec.p_value - *rec.pop));
          }
          if (gaps.empty()) {
            ok = false;
            continue;
          }
          std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2,
                           gaps.end());
          double median = gaps[gaps.size() / 2];
          double bound = (test == "beta1" ? 0.03 : 0.05) * (n == 100 ? 2.0 : 1.0);
          if (median >= bound) ok = false;
          os << " n=" << n << ",J=" << J << "," << test << ": med "
             << median << " (<" << bound << ")";
        }
      }
    }
    return std::make_pair(ok, os.str());
  });

  criterion(9, "special-function battery", 60.0, [] {
    bool ok = true;
    std::ostringstream os;

    // reflection identity
    std::mt19937_64 engine(kMasterSeed + 2);
    std::uniform_real_distribution<double> ux(0.01, 0.99);
    std::uniform_real_distribution<double> ule(-1.0, 3.0);
    double worst_reflect = 0.0;
    for (int i = 0; i < 2000; ++i) {
      double x = ux(engine);
      double a = std::pow(10.0, ule(engine));
      double b = std::pow(10.0, ule(engine));
      worst_reflect = std::max(
          worst_reflect, std::abs(double(reg_inc_beta(x, a, b)) +
                                  double(reg_inc_beta(1.0 - x, b, a)) - 1.0));
    }
    ok = ok && worst_reflect < 1e-12;
    os << "reflection max " << worst_reflect;

    // binomial tail identity against direct log-space summation
    double worst_tail = 0.0;
    for (double p : {0.1, 0.5, 0.9}) {
      for (std::int64_t n = 1; n <= 500; ++n) {
        for (std::int64_t y = 1; y <= n; ++y) {
          double lhs = oracles::binom_upper_logsum(y, n, p);
          double rhs = reg_inc_beta(p, static_cast<double>(y),
                                    static_cast<double>(n - y + 1));
          worst_tail = std::max(worst_tail, std::abs(lhs - rhs));
        }
      }
    }
    ok = ok && worst_tail < 1e-12;
    os << ", binomial-tail max " << worst_tail;

    // quadrature oracle
    std::uniform_real_distribution<double> uab(1.0, 50.0);
    double worst_quad = 0.0;
    for (int i = 0; i < 100; ++i) {
      double x = ux(engine), a = uab(engine), b = uab(engine);
      worst_quad = std::max(worst_quad,
                            std::abs(double(reg_inc_beta(x, a, b)) -
                                     oracles::ibeta_quadrature(x, a, b, 1e-13)));
    }
    ok = ok && worst_quad <= 1e-10;
    os << ", quadrature max " << worst_quad;
    return std::make_pair(ok, os.str());
  });

  criterion(10, "seeded experiments are byte-identical across runs", 900.0, [] {
    bool ok = true;
    std::ostringstream os;
    auto same = [&](const std::string& name, const std::string& a,
                    const std::string& b) {
      if (a != b) {
        ok = false;
        os << name << ": MISMATCH ";
      }
    };
    same("table1", to_csv(run_table1()), to_csv(run_table1()));
    same("table2", to_csv(run_table2()), to_csv(run_table2()));
    same("fig_birth", to_csv(run_fig_birth_sweep()), to_csv(run_fig_birth_sweep()));
    same("fig_coin", to_csv(run_fig_coin_sweep()), to_csv(run_fig_coin_sweep()));
    same("fig_mvn", to_csv(run_fig_mvn(1000, kMasterSeed)),
         to_csv(run_fig_mvn(1000, kMasterSeed)));
    same("fig_raneff", to_csv(run_fig_raneff(kMasterSeed)),
         to_csv(run_fig_raneff(kMasterSeed)));
    if (ok) os << "six experiments stable";
    return std::make_pair(ok, os.str());
  });

  std::printf("%s: %d criterion failure(s)\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              g_failures);
  return g_failures;
}
