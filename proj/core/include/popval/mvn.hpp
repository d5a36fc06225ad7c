#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "popval/report.hpp"

namespace popval {

/// Known-covariance sampling model: Xbar ~ N_p(mu, Sigma/n).
struct MvnModel {
  Eigen::MatrixXd sigma;
  std::int64_t n;

  MvnModel(Eigen::MatrixXd sigma_, std::int64_t n_);

  Eigen::Index dim() const { return sigma.rows(); }
};

/// K nonzero contrast vectors c_1..c_K, each of length p.
struct ContrastSet {
  std::vector<Eigen::VectorXd> contrasts;

  explicit ContrastSet(std::vector<Eigen::VectorXd> contrasts_);
};

/// Conjugate prior mu ~ N_p(mu0, Sigma0).
struct MvnPrior {
  Eigen::VectorXd mu0;
  Eigen::MatrixXd sigma0;

  MvnPrior(Eigen::VectorXd mu0_, Eigen::MatrixXd sigma0_);
};

/// Posterior mu | D ~ N_p(mu_n, Sigma_n).
struct MvnPosterior {
  Eigen::VectorXd mu_n;
  Eigen::MatrixXd sigma_n;
};

/// Contrast-wise test summary plus the intersection rejection rule:
/// reject when all K p-values fall below alpha.
struct MvnTestSummary {
  std::vector<TestReport> per_contrast;
  double alpha;
  bool reject_all_one_sided;
  bool reject_all_two_sided;
};

/// Z_k = c_k' Xbar / sqrt(c_k' Sigma c_k / n) for each contrast.
std::vector<double> sasabuchi_z(const MvnModel& model,
                                const Eigen::VectorXd& xbar,
                                const ContrastSet& contrasts);

/// One- and two-sided p-values per contrast from the Z statistics.
MvnTestSummary mvn_pvalues(const std::vector<double>& z, double alpha = 0.05);

/// Conjugate update via Cholesky solves of (Sigma0 + Sigma/n); the
/// posterior covariance is re-symmetrized to keep it SPD downstream.
MvnPosterior mvn_posterior(const MvnModel& model, const Eigen::VectorXd& xbar,
                           const MvnPrior& prior);

/// Per-contrast posterior reports: c'mu is univariate normal with mean
/// c'mu_n and variance c'Sigma_n c, so every PoP is a closed-form
/// normal tail.
std::vector<PosteriorReport> mvn_pop(const MvnPosterior& post,
                                     const ContrastSet& contrasts);

}  // namespace popval
