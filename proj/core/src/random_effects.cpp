#include "popval/random_effects.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "popval/special.hpp"

namespace popval {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Per-cluster sufficient statistics; every likelihood quantity of the
// compound-symmetric model reduces to these.
struct ClusterSuff {
  double sx, sxx, sy, sxy, syy;
};

struct Suff {
  std::vector<ClusterSuff> cluster;
  double J;
  double N;
  double sx = 0, sxx = 0, sy = 0, sxy = 0, syy = 0;  // totals
  double var_y = 0;
};

Suff make_suff(const LmmData& data) {
  const auto n = data.clusters();
  const auto J = data.cluster_size();
  if (n < 2 || J < 2) throw domain_error("lmm requires n >= 2, J >= 2");
  Suff s;
  s.J = static_cast<double>(J);
  s.N = static_cast<double>(n * J);
  s.cluster.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    ClusterSuff c{0, 0, 0, 0, 0};
    for (Eigen::Index j = 0; j < J; ++j) {
      double x = data.x(i, j);
      double y = data.y(i, j);
      c.sx += x;
      c.sxx += x * x;
      c.sy += y;
      c.sxy += x * y;
      c.syy += y * y;
    }
    s.cluster[static_cast<std::size_t>(i)] = c;
    s.sx += c.sx;
    s.sxx += c.sxx;
    s.sy += c.sy;
    s.sxy += c.sxy;
    s.syy += c.syy;
  }
  double mean_y = s.sy / s.N;
  s.var_y = std::max(s.syy / s.N - mean_y * mean_y, 1e-300);
  return s;
}

struct Gls {
  double beta0, beta1;
  double se_beta1;
};

// GLS coefficients for fixed variance components. With the Woodbury form
// V^{-1} = (I - c 11')/sigma2, c = tau2/(sigma2 + J tau2), each cluster
// contributes closed-form 2x2 pieces.
Gls gls_solve(const Suff& s, double tau2, double sigma2) {
  double c = tau2 / (sigma2 + s.J * tau2);
  double a00 = 0, a01 = 0, a11 = 0, r0 = 0, r1 = 0;
  for (const auto& cl : s.cluster) {
    a00 += s.J - c * s.J * s.J;
    a01 += cl.sx - c * s.J * cl.sx;
    a11 += cl.sxx - c * cl.sx * cl.sx;
    r0 += cl.sy - c * s.J * cl.sy;
    r1 += cl.sxy - c * cl.sx * cl.sy;
  }
  double det = a00 * a11 - a01 * a01;
  if (!(det > 1e-12 * std::abs(a00 * a11)))
    throw domain_error("singular design: covariate has no within-sample variation");
  double beta0 = (a11 * r0 - a01 * r1) / det;
  double beta1 = (a00 * r1 - a01 * r0) / det;
  double se_beta1 = std::sqrt(sigma2 * a00 / det);
  return Gls{beta0, beta1, se_beta1};
}

double loglik_from_suff(const Suff& s, double beta0, double beta1, double tau2,
                        double sigma2) {
  double c = tau2 / (sigma2 + s.J * tau2);
  double lndet = (s.J - 1.0) * std::log(sigma2) + std::log(sigma2 + s.J * tau2);
  double ll = 0.0;
  for (const auto& cl : s.cluster) {
    double r_sum = cl.sy - s.J * beta0 - beta1 * cl.sx;
    double r_sq = cl.syy - 2.0 * beta0 * cl.sy - 2.0 * beta1 * cl.sxy +
                  s.J * beta0 * beta0 + 2.0 * beta0 * beta1 * cl.sx +
                  beta1 * beta1 * cl.sxx;
    ll += -0.5 * (s.J * kLog2Pi + lndet + (r_sq - c * r_sum * r_sum) / sigma2);
  }
  return ll;
}

double profile_loglik(const Suff& s, double tau2, double sigma2) {
  Gls g = gls_solve(s, tau2, sigma2);
  return loglik_from_suff(s, g.beta0, g.beta1, tau2, sigma2);
}

// Gradient of the profile log-likelihood in (log tau2, log sigma2). The
// GLS beta is the inner argmax, so by the envelope theorem only the
// explicit dependence matters:
//   d ll / d tau2   = -1/2 sum_i [ J/g - r_sum_i^2 / g^2 ]
//   d ll / d sigma2 = -1/2 sum_i [ (J-1)/sigma2 + 1/g - r_sq_i/sigma2^2
//                                  + tau2 r_sum_i^2 (g + sigma2)/(sigma2 g)^2 ]
// with g = sigma2 + J tau2 and residuals at the GLS solution.
std::array<double, 2> profile_grad_u(const Suff& s, double tau2, double sigma2) {
  Gls fit = gls_solve(s, tau2, sigma2);
  double g = sigma2 + s.J * tau2;
  double d_tau2 = 0.0, d_sigma2 = 0.0;
  for (const auto& cl : s.cluster) {
    double r_sum = cl.sy - s.J * fit.beta0 - fit.beta1 * cl.sx;
    double r_sq = cl.syy - 2.0 * fit.beta0 * cl.sy - 2.0 * fit.beta1 * cl.sxy +
                  s.J * fit.beta0 * fit.beta0 +
                  2.0 * fit.beta0 * fit.beta1 * cl.sx +
                  fit.beta1 * fit.beta1 * cl.sxx;
    d_tau2 += s.J / g - r_sum * r_sum / (g * g);
    d_sigma2 += (s.J - 1.0) / sigma2 + 1.0 / g - r_sq / (sigma2 * sigma2) +
                tau2 * r_sum * r_sum * (g + sigma2) / (sigma2 * g * sigma2 * g);
  }
  return {-0.5 * d_tau2 * tau2, -0.5 * d_sigma2 * sigma2};
}

// Newton refinement in u = (log tau2, log sigma2) with the analytic
// gradient and a finite-difference Hessian. Lands independent searches
// on the same stationary point to near machine precision, which the
// scale-equivariance guarantees rely on. Near the optimum the objective
// itself cannot resolve progress (its noise floor is ~N eps), so small
// Newton steps are taken on the gradient alone.
std::array<double, 2> newton_polish(const Suff& s, std::array<double, 2> u,
                                    double floor_log) {
  auto value = [&](const std::array<double, 2>& p) {
    return profile_loglik(s, std::exp(p[0]), std::exp(p[1]));
  };
  auto grad = [&](const std::array<double, 2>& p) {
    return profile_grad_u(s, std::exp(p[0]), std::exp(p[1]));
  };
  for (int it = 0; it < 60; ++it) {
    if (u[0] <= floor_log) break;  // boundary candidate, handled by caller
    std::array<double, 2> g = grad(u);
    if (std::max(std::abs(g[0]), std::abs(g[1])) < 1e-11 * (1.0 + s.N)) break;
    const double h = 1e-5;
    auto gp0 = grad({u[0] + h, u[1]});
    auto gm0 = grad({u[0] - h, u[1]});
    auto gp1 = grad({u[0], u[1] + h});
    auto gm1 = grad({u[0], u[1] - h});
    double h00 = (gp0[0] - gm0[0]) / (2.0 * h);
    double h01 = 0.5 * ((gp1[0] - gm1[0]) + (gp0[1] - gm0[1])) / (2.0 * h);
    double h11 = (gp1[1] - gm1[1]) / (2.0 * h);
    double det = h00 * h11 - h01 * h01;
    std::array<double, 2> step;
    if (det > 0.0 && h00 < 0.0) {  // negative definite: Newton toward the max
      step = {-(h11 * g[0] - h01 * g[1]) / det,
              -(h00 * g[1] - h01 * g[0]) / det};
    } else {  // fall back to a scaled ascent step
      double scale = 1.0 / (1.0 + s.N);
      step = {g[0] * scale, g[1] * scale};
    }
    double norm = std::max(std::abs(step[0]), std::abs(step[1]));
    if (norm < 1e-14) break;
    if (norm <= 1e-4) {
      // trust region of a converging Newton iteration
      u = {std::max(u[0] + step[0], floor_log),
           std::max(u[1] + step[1], floor_log)};
      continue;
    }
    if (norm > 1.0) {
      step[0] /= norm;
      step[1] /= norm;
    }
    double f = value(u);
    double t = 1.0;
    bool moved = false;
    for (int back = 0; back < 12; ++back) {
      std::array<double, 2> cand{std::max(u[0] + t * step[0], floor_log),
                                 std::max(u[1] + t * step[1], floor_log)};
      if (value(cand) > f) {
        u = cand;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return u;
}

struct NelderMeadResult {
  std::array<double, 2> x;
  double f;
  bool converged;
  int iters;
};

// Standard 2-D Nelder-Mead on f (minimization).
template <typename F>
NelderMeadResult nelder_mead(F f, std::array<double, 2> x0, double step,
                             int max_iter = 600) {
  using Point = std::array<double, 2>;
  std::array<Point, 3> xs{x0, Point{x0[0] + step, x0[1]},
                          Point{x0[0], x0[1] + step}};
  std::array<double, 3> fs{f(xs[0]), f(xs[1]), f(xs[2])};
  auto order = [&] {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2 - i; ++j)
        if (fs[j] > fs[j + 1]) {
          std::swap(fs[j], fs[j + 1]);
          std::swap(xs[j], xs[j + 1]);
        }
  };
  int it = 0;
  for (; it < max_iter; ++it) {
    order();
    double fspread = std::abs(fs[2] - fs[0]);
    double xspread = std::max(std::abs(xs[2][0] - xs[0][0]) +
                                  std::abs(xs[1][0] - xs[0][0]),
                              std::abs(xs[2][1] - xs[0][1]) +
                                  std::abs(xs[1][1] - xs[0][1]));
    if (fspread < 1e-11 * (1.0 + std::abs(fs[0])) && xspread < 1e-8)
      return {xs[0], fs[0], true, it};
    Point centroid{(xs[0][0] + xs[1][0]) / 2.0, (xs[0][1] + xs[1][1]) / 2.0};
    auto at = [&](double t) {
      return Point{centroid[0] + t * (centroid[0] - xs[2][0]),
                   centroid[1] + t * (centroid[1] - xs[2][1])};
    };
    Point xr = at(1.0);
    double fr = f(xr);
    if (fr < fs[0]) {
      Point xe = at(2.0);
      double fe = f(xe);
      if (fe < fr) {
        xs[2] = xe;
        fs[2] = fe;
      } else {
        xs[2] = xr;
        fs[2] = fr;
      }
    } else if (fr < fs[1]) {
      xs[2] = xr;
      fs[2] = fr;
    } else {
      Point xc = at(fr < fs[2] ? 0.5 : -0.5);
      double fc = f(xc);
      if (fc < std::min(fr, fs[2])) {
        xs[2] = xc;
        fs[2] = fc;
      } else {  // shrink toward best
        for (int k = 1; k < 3; ++k) {
          xs[k] = Point{xs[0][0] + 0.5 * (xs[k][0] - xs[0][0]),
                        xs[0][1] + 0.5 * (xs[k][1] - xs[0][1])};
          fs[k] = f(xs[k]);
        }
      }
    }
  }
  order();
  return {xs[0], fs[0], false, it};
}

}  // namespace

LmmData generate_lmm(const LmmConfig& cfg) {
  std::mt19937_64 engine(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  LmmData data;
  data.x.resize(cfg.n, cfg.J);
  data.y.resize(cfg.n, cfg.J);
  for (std::int64_t i = 0; i < cfg.n; ++i) {
    double b = cfg.tau * gauss(engine);
    for (std::int64_t j = 0; j < cfg.J; ++j) {
      double x = unif(engine);
      double eps = cfg.sigma * gauss(engine);
      data.x(i, j) = x;
      data.y(i, j) = cfg.beta0 + cfg.beta1 * x + b + eps;
    }
  }
  return data;
}

double lmm_loglik(const LmmData& data, double beta0, double beta1, double tau2,
                  double sigma2) {
  if (!(sigma2 > 0.0) || tau2 < 0.0)
    throw domain_error("lmm_loglik requires sigma2 > 0 and tau2 >= 0");
  Suff s = make_suff(data);
  return loglik_from_suff(s, beta0, beta1, tau2, sigma2);
}

LmmFit fit_lmm_ml(const LmmData& data) {
  Suff s = make_suff(data);

  // method-of-moments start from OLS residual components
  Gls ols = gls_solve(s, 0.0, 1.0);
  double within = 0.0, between_sum = 0.0, between_sq = 0.0;
  double n_clusters = static_cast<double>(s.cluster.size());
  for (const auto& cl : s.cluster) {
    double r_sum = cl.sy - s.J * ols.beta0 - ols.beta1 * cl.sx;
    double r_sq = cl.syy - 2.0 * ols.beta0 * cl.sy - 2.0 * ols.beta1 * cl.sxy +
                  s.J * ols.beta0 * ols.beta0 +
                  2.0 * ols.beta0 * ols.beta1 * cl.sx +
                  ols.beta1 * ols.beta1 * cl.sxx;
    within += r_sq - r_sum * r_sum / s.J;
    between_sum += r_sum / s.J;
    between_sq += (r_sum / s.J) * (r_sum / s.J);
  }
  double sigma2_mom = std::max(within / (n_clusters * (s.J - 1.0)), 1e-8 * s.var_y);
  double mean_between = between_sum / n_clusters;
  double var_between =
      between_sq / n_clusters - mean_between * mean_between;
  double tau2_mom =
      std::max(var_between - sigma2_mom / s.J, 1e-3 * s.var_y);

  const double floor_log = std::log(1e-12 * s.var_y);
  auto objective = [&](std::array<double, 2> u) {
    double t2 = std::exp(std::max(u[0], floor_log));
    double s2 = std::exp(std::max(u[1], floor_log));
    return -profile_loglik(s, t2, s2);
  };

  const std::array<double, 3> tau_scale{1.0, 2.5, 0.4};
  NelderMeadResult best{{0, 0}, std::numeric_limits<double>::infinity(), false, 0};
  bool any_converged = false;
  for (double scale : tau_scale) {
    std::array<double, 2> u0{std::log(tau2_mom * scale), std::log(sigma2_mom)};
    NelderMeadResult r = nelder_mead(objective, u0, 0.4);
    any_converged = any_converged || r.converged;
    if (r.f < best.f) best = r;
  }
  if (!any_converged) {
    std::ostringstream trace;
    trace << "lmm ML optimizer failed to converge; best objective " << best.f
          << " at (log tau2, log sigma2) = (" << best.x[0] << ", " << best.x[1]
          << ") after " << best.iters << " iterations";
    throw numerical_error(trace.str(), best.iters);
  }

  std::array<double, 2> u_hat = newton_polish(s, best.x, floor_log);
  double tau2_hat = std::exp(std::max(u_hat[0], floor_log));
  double sigma2_hat = std::exp(std::max(u_hat[1], floor_log));
  double ll_interior = profile_loglik(s, tau2_hat, sigma2_hat);

  // tau2 = 0 boundary profile in closed form (OLS + ML residual variance)
  double rss = 0.0;
  for (const auto& cl : s.cluster) {
    rss += cl.syy - 2.0 * ols.beta0 * cl.sy - 2.0 * ols.beta1 * cl.sxy +
           s.J * ols.beta0 * ols.beta0 + 2.0 * ols.beta0 * ols.beta1 * cl.sx +
           ols.beta1 * ols.beta1 * cl.sxx;
  }
  double sigma2_boundary = rss / s.N;
  double ll_boundary =
      -0.5 * s.N * (kLog2Pi + std::log(sigma2_boundary) + 1.0);

  if (ll_boundary >= ll_interior || tau2_hat < 1e-8 * s.var_y) {
    Gls g = gls_solve(s, 0.0, sigma2_boundary);
    return LmmFit{g.beta0, g.beta1, 0.0,       sigma2_boundary,
                  g.se_beta1, ll_boundary, true};
  }
  Gls g = gls_solve(s, tau2_hat, sigma2_hat);
  return LmmFit{g.beta0,    g.beta1,     tau2_hat, sigma2_hat,
                g.se_beta1, ll_interior, false};
}

TestReport wald_test_beta1(const LmmFit& fit, double delta) {
  if (!std::isfinite(delta)) throw domain_error("delta must be finite");
  double stat = (fit.beta1_hat - delta) / fit.se_beta1;
  double upper = normal_sf(stat);
  double lower = normal_cdf(stat);
  return TestReport{stat, upper, lower, two_sided_from_tails(upper, lower)};
}

TestReport wald_test_tau2(const LmmFit& fit, double xi, std::int64_t J,
                          std::int64_t N) {
  if (!(xi > 0.0)) throw domain_error("xi must be positive");
  if (J < 2 || N < J) throw domain_error("wald_test_tau2 requires J >= 2, N >= J");
  if (!(fit.tau2_hat > 0.0)) {
    // boundary fit: log tau2_hat = -inf, all mass below any xi > 0
    return TestReport{-std::numeric_limits<double>::infinity(), 1.0, 0.0, 0.0};
  }
  double Jd = static_cast<double>(J);
  double t2 = fit.tau2_hat;
  double s2 = fit.sigma2_hat;
  double avar = 2.0 * s2 * s2 / (Jd * (Jd - 1.0)) +
                2.0 * (Jd * t2 + s2) * (Jd * t2 + s2) / Jd;
  // delta method on the log scale: Var(log tau2_hat) ~ avar / (N tau^4)
  double log_sd = std::sqrt(avar / static_cast<double>(N)) / t2;
  double stat = (std::log(t2) - std::log(xi)) / log_sd;
  double upper = normal_sf(stat);
  double lower = normal_cdf(stat);
  return TestReport{stat, upper, lower, two_sided_from_tails(upper, lower)};
}

GibbsChain gibbs_chain(const LmmData& data, const GibbsOptions& opts) {
  if (opts.iters <= opts.burnin || opts.burnin < 0)
    throw domain_error("gibbs requires iters > burnin >= 0");
  Suff s = make_suff(data);
  const auto n = static_cast<std::size_t>(data.clusters());
  const double J = s.J;
  const double N = s.N;

  std::mt19937_64 engine(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // fixed-effect normal equations (X'X for the design with intercept)
  double a00 = N, a01 = s.sx, a11 = s.sxx;
  double det = a00 * a11 - a01 * a01;
  if (!(det > 1e-12 * std::abs(a00 * a11)))
    throw domain_error("singular design: covariate has no within-sample variation");
  // Cholesky of (X'X)^{-1}: lower triangular l00, l10, l11
  double i00 = a11 / det, i01 = -a01 / det, i11 = a00 / det;
  double l00 = std::sqrt(i00);
  double l10 = i01 / l00;
  double l11 = std::sqrt(i11 - l10 * l10);

  // start from OLS and a small positive variance split
  Gls ols = gls_solve(s, 0.0, 1.0);
  double beta0 = ols.beta0, beta1 = ols.beta1;
  double sigma2 = std::max(0.5 * s.var_y, 1e-6);
  double tau2 = std::max(0.1 * s.var_y, 1e-6);
  std::vector<double> b(n, 0.0);

  auto draw_inv_gamma = [&](double shape, double rate) {
    std::gamma_distribution<double> g(shape, 1.0);
    double v = g(engine);
    if (!(v > 0.0) || !std::isfinite(v) || !std::isfinite(rate) || !(rate > 0.0))
      throw numerical_error("sampler divergence: inverse-gamma conditional");
    return rate / v;
  };

  GibbsChain chain;
  const auto kept = static_cast<std::size_t>(opts.iters - opts.burnin);
  chain.beta1.reserve(kept);
  chain.tau2.reserve(kept);

  for (std::int64_t iter = 0; iter < opts.iters; ++iter) {
    // b_i | rest
    double sum_b = 0.0, sum_b2 = 0.0;
    double prec = J / sigma2 + 1.0 / tau2;
    double v = 1.0 / prec;
    double sd = std::sqrt(v);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& cl = s.cluster[i];
      double r_sum = cl.sy - J * beta0 - beta1 * cl.sx;
      double m = v * r_sum / sigma2;
      b[i] = m + sd * gauss(engine);
      sum_b += b[i];
      sum_b2 += b[i] * b[i];
    }

    // beta | rest, outcomes shifted by the cluster effects
    double w0 = s.sy, w1 = s.sxy;
    for (std::size_t i = 0; i < n; ++i) {
      w0 -= J * b[i];
      w1 -= b[i] * s.cluster[i].sx;
    }
    double mean0 = i00 * w0 + i01 * w1;
    double mean1 = i01 * w0 + i11 * w1;
    double sig = std::sqrt(sigma2);
    double z0 = gauss(engine), z1 = gauss(engine);
    beta0 = mean0 + sig * (l00 * z0);
    beta1 = mean1 + sig * (l10 * z0 + l11 * z1);

    // sigma2 | rest: residuals about beta and b
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& cl = s.cluster[i];
      double r_sum = cl.sy - J * beta0 - beta1 * cl.sx;
      double r_sq = cl.syy - 2.0 * beta0 * cl.sy - 2.0 * beta1 * cl.sxy +
                    J * beta0 * beta0 + 2.0 * beta0 * beta1 * cl.sx +
                    beta1 * beta1 * cl.sxx;
      sse += r_sq - 2.0 * b[i] * r_sum + J * b[i] * b[i];
    }
    sigma2 = draw_inv_gamma(opts.ig_shape + 0.5 * N, opts.ig_rate + 0.5 * sse);

    // tau2 | rest
    tau2 = draw_inv_gamma(opts.ig_shape + 0.5 * static_cast<double>(n),
                          opts.ig_rate + 0.5 * sum_b2);
    (void)sum_b;

    if (!std::isfinite(beta1) || !std::isfinite(sigma2) || !std::isfinite(tau2))
      throw numerical_error("sampler divergence: non-finite state");

    if (iter >= opts.burnin) {
      chain.beta1.push_back(beta1);
      chain.tau2.push_back(tau2);
    }
  }
  return chain;
}

std::pair<double, double> tail_frequency(const std::vector<double>& draws,
                                         double threshold) {
  if (draws.empty()) throw domain_error("tail_frequency on empty draws");
  const std::size_t m = draws.size();
  double hits = 0.0;
  for (double d : draws) hits += d <= threshold ? 1.0 : 0.0;
  double p = hits / static_cast<double>(m);

  const std::size_t batches = std::min<std::size_t>(32, m);
  const std::size_t len = m / batches;
  double mean_acc = 0.0, sq_acc = 0.0;
  for (std::size_t k = 0; k < batches; ++k) {
    double h = 0.0;
    for (std::size_t t = k * len; t < (k + 1) * len; ++t)
      h += draws[t] <= threshold ? 1.0 : 0.0;
    double bm = h / static_cast<double>(len);
    mean_acc += bm;
    sq_acc += bm * bm;
  }
  double bmean = mean_acc / static_cast<double>(batches);
  double bvar = std::max(sq_acc / static_cast<double>(batches) - bmean * bmean, 0.0);
  double mcse = std::sqrt(bvar / static_cast<double>(batches - 1));
  return {p, mcse};
}

GibbsPop gibbs_pop(const LmmData& data, const HypothesisThresholds& thresholds,
                   const GibbsOptions& opts) {
  GibbsChain chain = gibbs_chain(data, opts);
  auto [pb, sb] = tail_frequency(chain.beta1, thresholds.delta);
  auto [pt, st] = tail_frequency(chain.tau2, thresholds.xi);
  return GibbsPop{pb, pt, sb, st};
}

}  // namespace popval
