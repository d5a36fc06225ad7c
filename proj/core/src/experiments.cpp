#include "popval/experiments.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "popval/discrete.hpp"
#include "popval/errors.hpp"
#include "popval/mvn.hpp"
#include "popval/random_effects.hpp"
#include "popval/rng.hpp"

namespace popval {
namespace {

const BinomialSample kBirthData{28298, 56099};
const BinomialSample kCoinData{9, 12};
constexpr double kBirthRatio = 0.5044297;

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

void append_params(ExperimentRecord& rec,
                   std::initializer_list<std::pair<std::string, std::string>> kv) {
  for (auto& p : kv) rec.parameters.push_back(p);
}

std::vector<ExperimentRecord> beta_sweep(const std::string& id,
                                         const BinomialSample& data,
                                         const std::vector<double>& grid) {
  NullPoint null(0.5);
  std::vector<ExperimentRecord> out;
  for (double ab : grid) {
    PosteriorReport rep = beta_posterior_pop(data, BetaParams(ab, ab), null);
    ExperimentRecord rec;
    rec.experiment_id = id;
    append_params(rec, {{"y", fmt_int(data.y)},
                        {"n", fmt_int(data.n)},
                        {"theta0", format_double(null.theta0)},
                        {"alpha", format_double(ab)},
                        {"beta", format_double(ab)}});
    rec.pop = rep.pop_le;
    rec.extras.emplace_back("pop_two_sided", format_double(rep.pop_two_sided));
    rec.extras.emplace_back("bayes_factor", format_double(rep.bayes_factor));
    out.push_back(std::move(rec));
  }
  return out;
}

ExperimentRecord sweep_row(const std::string& id, std::int64_t n, std::int64_t y) {
  BinomialSample data(y, n);
  NullPoint null(0.5);
  BetaParams prior(1e-6, 1e-6);
  double p_b = binom_exact_pvalue(data, null, Tail::upper);
  double p_nb = negbinom_pvalue(data, null);
  double pop = beta_posterior_pop(data, prior, null).pop_le;
  ExperimentRecord rec;
  rec.experiment_id = id;
  append_params(rec, {{"n", fmt_int(n)},
                      {"y", fmt_int(y)},
                      {"theta0", "0.5"},
                      {"prior_alpha", "1e-06"},
                      {"prior_beta", "1e-06"}});
  rec.p_value = p_nb;
  rec.pop = pop;
  rec.extras.emplace_back("p_value_b", format_double(p_b));
  rec.extras.emplace_back("ratio_nb_pop", format_double(p_nb / pop));
  rec.extras.emplace_back("ratio_b_pop", format_double(p_b / pop));
  rec.extras.emplace_back("log_ratio_nb", format_double(std::log(p_nb / pop)));
  rec.extras.emplace_back("log_ratio_b", format_double(std::log(p_b / pop)));
  return rec;
}

}  // namespace

std::string format_double(double v) {
  // shortest representation that round-trips to the same double
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string to_csv(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw domain_error("no records to serialize");
  const auto& first = records.front();
  std::ostringstream os;
  os << "experiment_id";
  for (const auto& [k, v] : first.parameters) os << ',' << k;
  os << ",p_value,pop";
  for (const auto& [k, v] : first.extras) os << ',' << k;
  os << '\n';
  for (const auto& rec : records) {
    if (rec.parameters.size() != first.parameters.size() ||
        rec.extras.size() != first.extras.size())
      throw domain_error("records do not share one schema");
    os << rec.experiment_id;
    for (const auto& [k, v] : rec.parameters) os << ',' << v;
    os << ',' << (rec.p_value ? format_double(*rec.p_value) : "");
    os << ',' << (rec.pop ? format_double(*rec.pop) : "");
    for (const auto& [k, v] : rec.extras) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

std::filesystem::path write_csv(const std::filesystem::path& dir,
                                const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw domain_error("no records to write");
  std::filesystem::create_directories(dir);
  std::filesystem::path path = dir / (records.front().experiment_id + ".csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << to_csv(records);
  return path;
}

std::vector<ExperimentRecord> run_table1() {
  return beta_sweep("table1", kBirthData,
                    {1.0, 0.1, 0.01, 0.001, 0.0001, 0.00001, 0.000001});
}

std::vector<ExperimentRecord> run_table2() {
  return beta_sweep("table2", kCoinData,
                    {2.0, 1.5, 1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1,
                     0.01, 0.001, 0.0001, 0.00001, 0.000001});
}

std::vector<ExperimentRecord> run_fig_birth_sweep() {
  // 60 log-spaced sample sizes between 50 and 2 * 56099, deduplicated
  const int points = 60;
  const double lo = std::log(50.0);
  const double hi = std::log(2.0 * 56099.0);
  std::vector<ExperimentRecord> out;
  std::int64_t last_n = 0;
  for (int k = 0; k < points; ++k) {
    double t = lo + (hi - lo) * k / (points - 1);
    auto n = static_cast<std::int64_t>(std::llround(std::exp(t)));
    if (n <= last_n) continue;
    last_n = n;
    auto y = static_cast<std::int64_t>(std::llround(kBirthRatio * n));
    y = std::clamp<std::int64_t>(y, 1, n - 1);
    out.push_back(sweep_row("fig_birth_sweep", n, y));
  }
  return out;
}

std::vector<ExperimentRecord> run_fig_coin_sweep() {
  std::vector<ExperimentRecord> out;
  for (std::int64_t n = 4; n <= 120; n += 4)
    out.push_back(sweep_row("fig_coin_sweep", n, 3 * n / 4));
  return out;
}

std::vector<ExperimentRecord> run_fig_mvn(std::int64_t replications,
                                          std::uint64_t seed) {
  if (replications < 1) throw domain_error("replications must be >= 1");
  const Eigen::Index p = 2;
  const std::int64_t n = 100;
  MvnModel model(Eigen::MatrixXd::Identity(p, p), n);
  MvnPrior prior(Eigen::VectorXd::Zero(p),
                 1000.0 * Eigen::MatrixXd::Identity(p, p));
  ContrastSet contrasts({Eigen::VectorXd::Unit(p, 0), Eigen::VectorXd::Unit(p, 1)});

  std::vector<ExperimentRecord> out;
  out.reserve(static_cast<std::size_t>(replications) * 2);
  for (std::int64_t rep = 0; rep < replications; ++rep) {
    std::mt19937_64 engine(derive_seed(seed, static_cast<std::uint64_t>(rep)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd xbar = Eigen::VectorXd::Zero(p);
    for (std::int64_t i = 0; i < n; ++i)
      for (Eigen::Index d = 0; d < p; ++d) xbar(d) += gauss(engine);
    xbar /= static_cast<double>(n);

    std::vector<double> z = sasabuchi_z(model, xbar, contrasts);
    MvnTestSummary tests = mvn_pvalues(z);
    MvnPosterior post = mvn_posterior(model, xbar, prior);
    std::vector<PosteriorReport> pops = mvn_pop(post, contrasts);

    for (std::size_t k = 0; k < pops.size(); ++k) {
      ExperimentRecord rec;
      rec.experiment_id = "fig_mvn";
      append_params(rec, {{"replication", fmt_int(rep)},
                          {"contrast", fmt_int(static_cast<std::int64_t>(k))},
                          {"n", fmt_int(n)},
                          {"dim", fmt_int(p)},
                          {"sigma0_scale", "1000"}});
      rec.p_value = tests.per_contrast[k].p_upper;
      rec.pop = pops[k].pop_le;
      rec.extras.emplace_back("z", format_double(z[k]));
      rec.extras.emplace_back("p_two_sided",
                              format_double(tests.per_contrast[k].p_two_sided));
      rec.extras.emplace_back("pop_two_sided",
                              format_double(pops[k].pop_two_sided));
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<ExperimentRecord> run_fig_raneff(std::uint64_t seed) {
  const std::array<std::int64_t, 2> ns{100, 500};
  const std::array<std::int64_t, 2> js{2, 5};
  const int grid_points = 41;
  std::vector<ExperimentRecord> out;
  std::uint64_t config_index = 0;
  for (std::int64_t n : ns) {
    for (std::int64_t J : js) {
      LmmConfig cfg(n, J, 0.2, 1.0, 0.5, 0.5, derive_seed(seed, config_index));
      LmmData data = generate_lmm(cfg);
      std::string status = "ok";
      LmmFit fit{};
      GibbsChain chain;
      try {
        fit = fit_lmm_ml(data);
        GibbsOptions gopts;
        gopts.seed = derive_seed(seed, 1000 + config_index);
        chain = gibbs_chain(data, gopts);
      } catch (const std::exception& e) {
        status = e.what();
      }
      auto emit = [&](const std::string& test, double threshold, double pvalue,
                      double pop, double mcse) {
        ExperimentRecord rec;
        rec.experiment_id = "fig_raneff";
        append_params(rec, {{"n", fmt_int(n)},
                            {"J", fmt_int(J)},
                            {"test", test},
                            {"threshold", format_double(threshold)}});
        rec.p_value = pvalue;
        rec.pop = pop;
        rec.extras.emplace_back("pop_mcse", format_double(mcse));
        rec.extras.emplace_back("status", status);
        out.push_back(std::move(rec));
      };
      if (status != "ok") {
        emit("beta1", 0.0, 0.0, 0.0, 0.0);
        ++config_index;
        continue;
      }
      for (int k = 0; k < grid_points; ++k) {
        double delta = fit.beta1_hat +
                       fit.se_beta1 * (-4.0 + 8.0 * k / (grid_points - 1));
        double p = wald_test_beta1(fit, delta).p_upper;
        auto [pop, mcse] = tail_frequency(chain.beta1, delta);
        emit("beta1", delta, p, pop, mcse);
      }
      for (int k = 0; k < grid_points; ++k) {
        double factor = std::exp(std::log(0.25) +
                                 (std::log(4.0) - std::log(0.25)) * k /
                                     (grid_points - 1));
        double xi = fit.tau2_hat * factor;
        double p = wald_test_tau2(fit, xi, J, n * J).p_upper;
        auto [pop, mcse] = tail_frequency(chain.tau2, xi);
        emit("tau2", xi, p, pop, mcse);
      }
      ++config_index;
    }
  }
  return out;
}

}  // namespace popval
