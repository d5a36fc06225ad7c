#include "popval/mvn.hpp"

#include <cmath>

#include "popval/special.hpp"

namespace popval {
namespace {

void check_spd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw domain_error(std::string(what) + " not square");
  double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
    throw domain_error(std::string(what) + " not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw domain_error(std::string(what) + " not positive definite");
}

}  // namespace

MvnModel::MvnModel(Eigen::MatrixXd sigma_, std::int64_t n_)
    : sigma(std::move(sigma_)), n(n_) {
  if (n < 1) throw domain_error("mvn model requires n >= 1");
  check_spd(sigma, "covariance");
}

ContrastSet::ContrastSet(std::vector<Eigen::VectorXd> contrasts_)
    : contrasts(std::move(contrasts_)) {
  if (contrasts.empty()) throw domain_error("contrast set is empty");
  Eigen::Index p = contrasts.front().size();
  for (const auto& c : contrasts) {
    if (c.size() != p) throw domain_error("contrast lengths disagree");
    if (c.norm() == 0.0) throw domain_error("contrast vector is zero");
  }
}

MvnPrior::MvnPrior(Eigen::VectorXd mu0_, Eigen::MatrixXd sigma0_)
    : mu0(std::move(mu0_)), sigma0(std::move(sigma0_)) {
  check_spd(sigma0, "prior covariance");
  if (mu0.size() != sigma0.rows())
    throw domain_error("prior mean and covariance dimensions disagree");
}

std::vector<double> sasabuchi_z(const MvnModel& model,
                                const Eigen::VectorXd& xbar,
                                const ContrastSet& contrasts) {
  if (xbar.size() != model.dim())
    throw domain_error("sample mean dimension does not match model");
  std::vector<double> z;
  z.reserve(contrasts.contrasts.size());
  for (const auto& c : contrasts.contrasts) {
    if (c.size() != model.dim())
      throw domain_error("contrast dimension does not match model");
    double denom2 = c.dot(model.sigma * c) / static_cast<double>(model.n);
    if (!(denom2 > 0.0))
      throw numerical_error("contrast quadratic form is not positive");
    z.push_back(c.dot(xbar) / std::sqrt(denom2));
  }
  return z;
}

MvnTestSummary mvn_pvalues(const std::vector<double>& z, double alpha) {
  MvnTestSummary out;
  out.alpha = alpha;
  out.reject_all_one_sided = true;
  out.reject_all_two_sided = true;
  out.per_contrast.reserve(z.size());
  for (double zk : z) {
    if (!std::isfinite(zk)) throw domain_error("non-finite test statistic");
    double upper = normal_sf(zk);
    double lower = normal_cdf(zk);
    double two = two_sided_from_tails(upper, lower);
    out.per_contrast.push_back(TestReport{zk, upper, lower, two});
    if (!(upper < alpha)) out.reject_all_one_sided = false;
    if (!(two < alpha)) out.reject_all_two_sided = false;
  }
  return out;
}

MvnPosterior mvn_posterior(const MvnModel& model, const Eigen::VectorXd& xbar,
                           const MvnPrior& prior) {
  if (xbar.size() != model.dim() || prior.mu0.size() != model.dim())
    throw domain_error("posterior input dimensions disagree");
  Eigen::MatrixXd sigma_over_n = model.sigma / static_cast<double>(model.n);
  Eigen::LLT<Eigen::MatrixXd> llt(prior.sigma0 + sigma_over_n);
  if (llt.info() != Eigen::Success)
    throw numerical_error("Sigma0 + Sigma/n is not factorizable (conditioning)");
  // mu_n = Sigma0 (Sigma0 + Sigma/n)^{-1} xbar + Sigma/n (Sigma0 + Sigma/n)^{-1} mu0
  // Sigma_n = Sigma/n (Sigma0 + Sigma/n)^{-1} Sigma0, the factored form of
  // (Sigma0^{-1} + n Sigma^{-1})^{-1}; its vague-prior limit is Sigma/n.
  Eigen::VectorXd mu_n =
      prior.sigma0 * llt.solve(xbar) + sigma_over_n * llt.solve(prior.mu0);
  Eigen::MatrixXd sigma_n = sigma_over_n * llt.solve(prior.sigma0);
  sigma_n = ((sigma_n + sigma_n.transpose()) / 2.0).eval();
  return MvnPosterior{std::move(mu_n), std::move(sigma_n)};
}

std::vector<PosteriorReport> mvn_pop(const MvnPosterior& post,
                                     const ContrastSet& contrasts) {
  std::vector<PosteriorReport> out;
  out.reserve(contrasts.contrasts.size());
  for (const auto& c : contrasts.contrasts) {
    if (c.size() != post.mu_n.size())
      throw domain_error("contrast dimension does not match posterior");
    double m = c.dot(post.mu_n);
    double v = c.dot(post.sigma_n * c);
    if (!(v > 0.0))
      throw numerical_error("posterior contrast variance is not positive");
    double ratio = m / std::sqrt(v);
    double pop_le = normal_sf(ratio);  // Pr(c'mu <= 0 | D)
    double pop_ge = normal_cdf(ratio);
    double two = two_sided_from_tails(pop_le, pop_ge);
    double bf = pop_le < 1.0 ? pop_le / (1.0 - pop_le)
                             : std::numeric_limits<double>::infinity();
    out.push_back(PosteriorReport{pop_le, pop_ge, two, bf});
  }
  return out;
}

}  // namespace popval
