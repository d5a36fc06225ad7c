#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace popval {

/// One output row: self-describing (carries its experiment id and the
/// full parameter set), with nullable p-value / posterior-probability
/// columns and free-form extras.
struct ExperimentRecord {
  std::string experiment_id;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::optional<double> p_value;
  std::optional<double> pop;
  std::vector<std::pair<std::string, std::string>> extras;
};

/// CSV with header experiment_id,<params...>,p_value,pop,<extras...>.
/// All records must share one schema; doubles are printed with %.17g so
/// repeated runs are byte-identical and values re-parse exactly.
std::string to_csv(const std::vector<ExperimentRecord>& records);

/// Writes <dir>/<experiment_id>.csv and returns the path.
std::filesystem::path write_csv(const std::filesystem::path& dir,
                                const std::vector<ExperimentRecord>& records);

std::string format_double(double v);

/// Beta-posterior sweep over the seven symmetric hyperparameter values
/// for the newborn-proportion data (y=28298, n=56099, theta0=0.5).
std::vector<ExperimentRecord> run_table1();

/// Seventeen-row hyperparameter sweep for the coin data (y=9, n=12).
std::vector<ExperimentRecord> run_table2();

/// Sample-size sweep at fixed y/n = 0.5044297: exact-binomial and
/// negative-binomial p-values against the Beta(1e-6,1e-6) posterior
/// probability, with p/PoP ratios. 60 log-spaced n from 50 to 112198.
std::vector<ExperimentRecord> run_fig_birth_sweep();

/// Sweep at fixed y/n = 0.75, n = 4,8,...,120, including the log-ratio
/// columns for the near-zero zoom.
std::vector<ExperimentRecord> run_fig_coin_sweep();

/// Seeded bivariate-normal study: per replication, contrast-wise one-
/// and two-sided p-values and posterior probabilities under the vague
/// prior Sigma0 = 1000 I (p = 2, n = 100, unit contrasts, truth mu = 0,
/// Sigma = I).
std::vector<ExperimentRecord> run_fig_mvn(std::int64_t replications,
                                          std::uint64_t seed);

/// Random-effects study over (n, J) in {100,500} x {2,5}: Wald p-values
/// and Gibbs posterior probabilities swept across thresholds
/// delta in beta1_hat +/- 4 se (41 points) and xi over
/// tau2_hat * [0.25, 4] (41 log-spaced points).
std::vector<ExperimentRecord> run_fig_raneff(std::uint64_t seed);

/// One golden-value check of the selftest.
struct GoldenCheck {
  std::string name;
  double expected;
  double observed;
  double tolerance;
  bool pass;
};

struct SelftestReport {
  std::vector<GoldenCheck> checks;
  bool all_pass;
};

/// Recomputes every closed-form reference value and compares at its
/// stated tolerance. `perturbation` is a fault-injection hook for
/// testing the harness itself: it is added to every observed value.
SelftestReport run_selftest(double perturbation = 0.0);

}  // namespace popval
