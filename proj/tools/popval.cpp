// popval: p-values and posterior probabilities of null hypotheses from one
// command line, plus the simulation studies that compare them.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "popval/discrete.hpp"
#include "popval/experiments.hpp"
#include "popval/mvn.hpp"
#include "popval/normal.hpp"
#include "popval/random_effects.hpp"
#include "popval/special.hpp"

using json = nlohmann::ordered_json;

namespace {

enum class Format { json, csv, plain };

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "plain") return Format::plain;
  throw CLI::ValidationError("--format", "expected json, csv or plain");
}

void emit(const json& obj, Format format) {
  switch (format) {
    case Format::json:
      std::cout << obj.dump(2) << '\n';
      return;
    case Format::plain:
      for (auto& [k, v] : obj.items())
        std::cout << k << " = "
                  << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
      return;
    case Format::csv: {
      std::ostringstream header, row;
      bool first = true;
      for (auto& [k, v] : obj.items()) {
        header << (first ? "" : ",") << k;
        row << (first ? "" : ",")
            << (v.is_string() ? v.get<std::string>() : v.dump());
        first = false;
      }
      std::cout << header.str() << '\n' << row.str() << '\n';
      return;
    }
  }
}

json test_report_json(const popval::TestReport& r) {
  return json{{"statistic", r.statistic},
              {"p_upper", double(r.p_upper)},
              {"p_lower", double(r.p_lower)},
              {"p_two_sided", double(r.p_two_sided)}};
}

json posterior_report_json(const popval::PosteriorReport& r) {
  return json{{"pop_le", double(r.pop_le)},
              {"pop_ge", double(r.pop_ge)},
              {"pop_two_sided", double(r.pop_two_sided)},
              {"bayes_factor", r.bayes_factor}};
}

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    values.push_back(std::stod(item));
  if (values.empty()) throw CLI::ValidationError("vector", "empty vector literal");
  return Eigen::Map<Eigen::VectorXd>(values.data(),
                                     static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
  std::vector<Eigen::VectorXd> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_vector(row));
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols())
      throw CLI::ValidationError("matrix", "ragged matrix literal");
    m.row(static_cast<Eigen::Index>(i)) = rows[i];
  }
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-values and Bayesian posterior probabilities of null hypotheses"};
  app.require_subcommand(1);
  app.fallthrough();  // allow --format after the subcommand

  std::string format_name = "json";
  app.add_option("--format", format_name, "output format: json, csv or plain")
      ->capture_default_str();

  // ---- binom ----
  auto* binom = app.add_subcommand("binom", "binomial test p-values");
  std::int64_t b_y = 0, b_n = 1;
  double b_theta0 = 0.5;
  std::string b_side = "upper", b_method = "exact";
  binom->add_option("--y", b_y, "success count")->required()->check(CLI::NonNegativeNumber);
  binom->add_option("--n", b_n, "trial count")->required()->check(CLI::PositiveNumber);
  binom->add_option("--theta0", b_theta0, "null success probability")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  binom->add_option("--side", b_side, "upper or lower")
      ->check(CLI::IsMember({"upper", "lower"}));
  binom->add_option("--method", b_method, "exact or normal-approx")
      ->check(CLI::IsMember({"exact", "normal-approx"}));

  // ---- negbinom ----
  auto* negbinom = app.add_subcommand(
      "negbinom", "negative binomial upper-tail p-value (r = n - y failures)");
  std::int64_t nb_y = 0, nb_n = 0, nb_failures = 0;
  double nb_theta0 = 0.5;
  negbinom->add_option("--y", nb_y, "success count")->required()->check(CLI::PositiveNumber);
  auto* nb_n_opt = negbinom->add_option("--n", nb_n, "total trial count y + r");
  auto* nb_r_opt =
      negbinom->add_option("--failures", nb_failures, "observed failure count r");
  nb_n_opt->excludes(nb_r_opt);
  negbinom->add_option("--theta0", nb_theta0, "null success probability")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));

  // ---- lindley ----
  auto* lindley = app.add_subcommand(
      "lindley", "posterior of a point null under the point-mass prior");
  std::int64_t l_y = 0, l_n = 1;
  double l_theta0 = 0.5;
  lindley->add_option("--y", l_y, "success count")->required()->check(CLI::NonNegativeNumber);
  lindley->add_option("--n", l_n, "trial count")->required()->check(CLI::PositiveNumber);
  lindley->add_option("--theta0", l_theta0, "null success probability")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));

  // ---- normal ----
  auto* normal = app.add_subcommand(
      "normal", "two-sample known-variance Z test and conjugate posterior");
  double nm_theta_hat = 0.0, nm_sigma2 = 1.0, nm_mu0 = 0.0, nm_sigma0_sq = 1.0;
  std::int64_t nm_n = 1;
  std::string nm_prior = "flat";
  normal->add_option("--theta-hat", nm_theta_hat, "observed mean difference")->required();
  normal->add_option("--sigma2", nm_sigma2, "known per-observation variance")
      ->required()->check(CLI::PositiveNumber);
  normal->add_option("--n", nm_n, "per-group sample size")->required()
      ->check(CLI::PositiveNumber);
  normal->add_option("--prior", nm_prior, "flat or normal")
      ->check(CLI::IsMember({"flat", "normal"}));
  normal->add_option("--mu0", nm_mu0, "normal prior mean");
  normal->add_option("--sigma0-sq", nm_sigma0_sq, "normal prior variance")
      ->check(CLI::PositiveNumber);

  // ---- mvn ----
  auto* mvn = app.add_subcommand(
      "mvn", "contrast-wise multivariate normal tests and posteriors");
  std::string mv_xbar, mv_sigma, mv_contrasts, mv_mu0, mv_sigma0;
  double mv_sigma0_scale = 1000.0, mv_alpha = 0.05;
  std::int64_t mv_n = 1;
  mvn->add_option("--xbar", mv_xbar, "sample mean, e.g. \"0.3,-0.1\"")->required();
  mvn->add_option("--sigma", mv_sigma, "known covariance rows, e.g. \"1,0;0,1\"")
      ->required();
  mvn->add_option("--n", mv_n, "sample size")->required()->check(CLI::PositiveNumber);
  mvn->add_option("--contrasts", mv_contrasts,
                  "contrast vectors separated by ';' (default: unit vectors)");
  mvn->add_option("--mu0", mv_mu0, "prior mean (default zero)");
  mvn->add_option("--sigma0", mv_sigma0, "prior covariance rows");
  mvn->add_option("--sigma0-scale", mv_sigma0_scale,
                  "use sigma0-scale * I as the prior covariance")
      ->check(CLI::PositiveNumber);
  mvn->add_option("--alpha", mv_alpha, "significance level")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));

  // ---- lmm ----
  auto* lmm = app.add_subcommand(
      "lmm", "simulate, fit and test a linear random-intercept model");
  std::int64_t lm_n = 100, lm_J = 2;
  double lm_beta0 = 0.2, lm_beta1 = 1.0, lm_tau = 0.5, lm_sigma = 0.5;
  double lm_delta = 1.0, lm_xi = 0.25;
  std::uint64_t lm_seed = 1;
  std::int64_t lm_iters = 20000, lm_burnin = 5000;
  lmm->add_option("--n", lm_n, "cluster count")->check(CLI::Range(std::int64_t(2), std::int64_t(1000000)));
  lmm->add_option("--J", lm_J, "cluster size")->check(CLI::Range(std::int64_t(2), std::int64_t(1000000)));
  lmm->add_option("--beta0", lm_beta0, "true intercept");
  lmm->add_option("--beta1", lm_beta1, "true slope");
  lmm->add_option("--tau", lm_tau, "random-intercept sd")->check(CLI::PositiveNumber);
  lmm->add_option("--sigma", lm_sigma, "residual sd")->check(CLI::PositiveNumber);
  lmm->add_option("--seed", lm_seed, "generator seed");
  lmm->add_option("--delta", lm_delta, "null boundary for beta1");
  lmm->add_option("--xi", lm_xi, "null boundary for tau^2")->check(CLI::PositiveNumber);
  lmm->add_option("--gibbs-iters", lm_iters, "Gibbs iterations")->check(CLI::PositiveNumber);
  lmm->add_option("--burnin", lm_burnin, "Gibbs burn-in")->check(CLI::NonNegativeNumber);

  // ---- experiment ----
  auto* experiment = app.add_subcommand("experiment", "write study CSV datasets");
  std::string ex_id = "all";
  std::string ex_out;
  std::uint64_t ex_seed = 20240501;
  std::int64_t ex_reps = 1000;
  experiment->add_option("--id", ex_id, "experiment id")
      ->check(CLI::IsMember({"table1", "table2", "fig-birth", "fig-coin",
                             "fig-mvn", "fig-raneff", "all"}));
  experiment->add_option("--out", ex_out,
                         "output directory (default $POPVAL_OUT_DIR or .)");
  experiment->add_option("--seed", ex_seed, "master seed for seeded studies");
  experiment->add_option("--replications", ex_reps, "fig-mvn replications")
      ->check(CLI::PositiveNumber);

  // ---- selftest ----
  auto* selftest =
      app.add_subcommand("selftest", "recompute and check every reference value");
  double st_inject = 0.0;
  selftest->add_option("--inject-error", st_inject,
                       "fault-injection offset added to every observed value")
      ->group("");  // hidden; exists for harness tests

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Format format = Format::json;
  try {
    format = parse_format(format_name);

    if (*binom) {
      popval::BinomialSample data(b_y, b_n);
      popval::NullPoint null(b_theta0);
      popval::Tail tail =
          b_side == "upper" ? popval::Tail::upper : popval::Tail::lower;
      popval::PvalueMethod method = b_method == "exact"
                                        ? popval::PvalueMethod::exact
                                        : popval::PvalueMethod::normal_approx;
      double p = method == popval::PvalueMethod::exact
                     ? double(popval::binom_exact_pvalue(data, null, tail))
                     : double(popval::binom_normal_approx_pvalue(data, null, tail));
      double two = popval::two_sided_pvalue_discrete(data, null, method);
      emit(json{{"y", b_y}, {"n", b_n}, {"theta0", b_theta0},
                {"side", b_side}, {"method", b_method},
                {"p_value", p}, {"p_two_sided", two}},
           format);
    } else if (*negbinom) {
      if (nb_n_opt->count() == 0 && nb_r_opt->count() == 0)
        throw CLI::RequiredError("--n or --failures");
      std::int64_t n = nb_n_opt->count() ? nb_n : nb_y + nb_failures;
      popval::BinomialSample data(nb_y, n);
      popval::NullPoint null(nb_theta0);
      double p = popval::negbinom_pvalue(data, null);
      emit(json{{"y", nb_y}, {"failures", n - nb_y}, {"n", n},
                {"theta0", nb_theta0}, {"p_value", p}},
           format);
    } else if (*lindley) {
      popval::BinomialSample data(l_y, l_n);
      popval::NullPoint null(l_theta0);
      double pop = popval::lindley_point_mass_pop(data, null);
      emit(json{{"y", l_y}, {"n", l_n}, {"theta0", l_theta0},
                {"pop_point_null", pop}},
           format);
    } else if (*normal) {
      popval::TwoSampleSummary summary(nm_theta_hat, nm_sigma2, nm_n);
      popval::NormalPrior prior =
          nm_prior == "flat" ? popval::NormalPrior::flat()
                             : popval::NormalPrior::normal(nm_mu0, nm_sigma0_sq);
      popval::TestReport test = popval::z_pvalues(summary);
      popval::NormalPosterior post = popval::normal_posterior(summary, prior);
      popval::PosteriorReport pop = popval::normal_pop(summary, prior);
      json obj{{"theta_hat", nm_theta_hat}, {"sigma2", nm_sigma2}, {"n", nm_n},
               {"prior", nm_prior}};
      obj["test"] = test_report_json(test);
      obj["posterior"] = json{{"mu", post.mu}, {"sigma_sq", post.sigma_sq}};
      obj["pop"] = posterior_report_json(pop);
      emit(obj, format);
    } else if (*mvn) {
      Eigen::VectorXd xbar = parse_vector(mv_xbar);
      Eigen::MatrixXd sigma = parse_matrix(mv_sigma);
      popval::MvnModel model(sigma, mv_n);
      Eigen::Index p = model.dim();
      std::vector<Eigen::VectorXd> cs;
      if (mv_contrasts.empty()) {
        for (Eigen::Index k = 0; k < p; ++k)
          cs.push_back(Eigen::VectorXd::Unit(p, k));
      } else {
        Eigen::MatrixXd m = parse_matrix(mv_contrasts);
        for (Eigen::Index k = 0; k < m.rows(); ++k)
          cs.push_back(m.row(k).transpose());
      }
      popval::ContrastSet contrasts(cs);
      Eigen::VectorXd mu0 = mv_mu0.empty() ? Eigen::VectorXd::Zero(p).eval()
                                           : parse_vector(mv_mu0);
      Eigen::MatrixXd sigma0 =
          mv_sigma0.empty()
              ? (mv_sigma0_scale * Eigen::MatrixXd::Identity(p, p)).eval()
              : parse_matrix(mv_sigma0);
      popval::MvnPrior prior(mu0, sigma0);

      std::vector<double> z = popval::sasabuchi_z(model, xbar, contrasts);
      popval::MvnTestSummary tests = popval::mvn_pvalues(z, mv_alpha);
      popval::MvnPosterior post = popval::mvn_posterior(model, xbar, prior);
      std::vector<popval::PosteriorReport> pops = popval::mvn_pop(post, contrasts);

      json per = json::array();
      for (std::size_t k = 0; k < pops.size(); ++k) {
        json item{{"contrast", k}};
        item["test"] = test_report_json(tests.per_contrast[k]);
        item["pop"] = posterior_report_json(pops[k]);
        per.push_back(item);
      }
      json obj{{"n", mv_n}, {"alpha", mv_alpha},
               {"reject_all_one_sided", tests.reject_all_one_sided},
               {"reject_all_two_sided", tests.reject_all_two_sided},
               {"contrasts", per}};
      emit(obj, format);
    } else if (*lmm) {
      popval::LmmConfig cfg(lm_n, lm_J, lm_beta0, lm_beta1, lm_tau, lm_sigma,
                            lm_seed);
      popval::LmmData data = popval::generate_lmm(cfg);
      popval::LmmFit fit = popval::fit_lmm_ml(data);
      popval::TestReport t1 = popval::wald_test_beta1(fit, lm_delta);
      popval::TestReport t2 = popval::wald_test_tau2(fit, lm_xi, lm_J, lm_n * lm_J);
      popval::GibbsOptions gopts;
      gopts.iters = lm_iters;
      gopts.burnin = lm_burnin;
      gopts.seed = lm_seed + 1;
      popval::GibbsPop pops = popval::gibbs_pop(
          data, popval::HypothesisThresholds(lm_delta, lm_xi), gopts);
      json obj{{"n", lm_n}, {"J", lm_J}, {"seed", lm_seed},
               {"delta", lm_delta}, {"xi", lm_xi}};
      obj["fit"] = json{{"beta0_hat", fit.beta0_hat},
                        {"beta1_hat", fit.beta1_hat},
                        {"tau2_hat", fit.tau2_hat},
                        {"sigma2_hat", fit.sigma2_hat},
                        {"se_beta1", fit.se_beta1},
                        {"loglik", fit.loglik},
                        {"tau2_boundary", fit.tau2_boundary}};
      obj["wald_beta1"] = test_report_json(t1);
      obj["wald_tau2"] = test_report_json(t2);
      obj["gibbs"] = json{{"pop_beta1", double(pops.pop_beta1)},
                          {"pop_tau2", double(pops.pop_tau2)},
                          {"mcse_beta1", pops.mcse_beta1},
                          {"mcse_tau2", pops.mcse_tau2}};
      emit(obj, format);
    } else if (*experiment) {
      std::filesystem::path dir;
      if (!ex_out.empty()) {
        dir = ex_out;
      } else if (const char* env = std::getenv("POPVAL_OUT_DIR")) {
        dir = env;
      } else {
        dir = ".";
      }
      auto write = [&](const std::vector<popval::ExperimentRecord>& records) {
        std::cout << popval::write_csv(dir, records).string() << '\n';
      };
      if (ex_id == "table1" || ex_id == "all") write(popval::run_table1());
      if (ex_id == "table2" || ex_id == "all") write(popval::run_table2());
      if (ex_id == "fig-birth" || ex_id == "all")
        write(popval::run_fig_birth_sweep());
      if (ex_id == "fig-coin" || ex_id == "all")
        write(popval::run_fig_coin_sweep());
      if (ex_id == "fig-mvn" || ex_id == "all")
        write(popval::run_fig_mvn(ex_reps, ex_seed));
      if (ex_id == "fig-raneff" || ex_id == "all")
        write(popval::run_fig_raneff(ex_seed));
    } else if (*selftest) {
      popval::SelftestReport report = popval::run_selftest(st_inject);
      for (const auto& c : report.checks) {
        std::printf("[%s] %-45s observed %.10g expected %.10g (tol %.1g)\n",
                    c.pass ? "ok" : "FAIL", c.name.c_str(), c.observed,
                    c.expected, c.tolerance);
      }
      std::printf("%zu checks, %s\n", report.checks.size(),
                  report.all_pass ? "all passed" : "FAILURES PRESENT");
      if (!report.all_pass) return 2;
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const popval::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const popval::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
