#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ridgesub/leverage.hpp"
#include "ridgesub/parallel.hpp"
#include "ridgesub/ridge.hpp"
#include "ridgesub/samplers.hpp"

namespace ridgesub {

/// Asymptotic variance / mean / MSE of the subsample estimator around the
/// full-sample fit, with M = (X^T X + lambda I)^-1:
///   Sigma_c = r^-1 M (sum_i pi_i^-1 e_i^2 x_i x_i^T) M
///   AVar    = Sigma_c - lambda^2 r^-1 M beta beta^T M
///   AE      = beta + (lambda - lambda_tilde) M beta
///   AMSE    = AVar + (lambda - lambda_tilde)^2 M beta beta^T M
struct TheoryReport {
  Eigen::MatrixXd sigma_c;
  Eigen::MatrixXd avar;
  Eigen::VectorXd ae;
  Eigen::MatrixXd amse;
  Index r = 0;
  double lambda = 0.0;
  double lambda_tilde = 0.0;
  bool avar_positive_semidefinite = true;  // flagged, never an error
};

namespace detail {

inline void require_positive_probabilities(const SamplingPlan& plan, Index n) {
  if (!plan.randomized()) throw std::invalid_argument("plan carries no probabilities");
  if (plan.pi.size() != n) throw std::invalid_argument("plan length does not match dataset");
  if (!(plan.pi.minCoeff() > 0.0)) throw std::invalid_argument("zero sampling probability");
}

}  // namespace detail

/// The pi-dependent core of the asymptotic variance. `fit` must be the
/// full-sample fit at the lambda of interest; its residuals supply e_i.
inline Eigen::MatrixXd sigma_c(const Dataset& d, const RidgeFit& fit, const SamplingPlan& plan,
                               Index r) {
  validate_dataset(d);
  detail::require_positive_probabilities(plan, d.n());
  if (r < 1) throw std::invalid_argument("subsample size must be positive");
  if (fit.residuals.size() != d.n()) throw std::invalid_argument("fit does not match dataset");

  const Eigen::VectorXd scale = fit.residuals.cwiseAbs2().cwiseQuotient(plan.pi);
  const Eigen::MatrixXd core = d.X.transpose() * scale.asDiagonal() * d.X;

  Eigen::MatrixXd A = d.X.transpose() * d.X;
  A.diagonal().array() += fit.lambda;
  const Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw std::runtime_error("normal-equation matrix not SPD");
  const Eigen::MatrixXd m_core = llt.solve(core);
  return llt.solve(m_core.transpose()).transpose() / static_cast<double>(r);
}

/// E{tr(Sigma_c)} = r^-1 sum_i pi_i^-1 (1 - h_ii) ||x_i||^2, the objective the
/// optimal probabilities minimize.
inline double expected_trace_objective(const Dataset& d, const LeverageProfile& profile,
                                       const SamplingPlan& plan, Index r) {
  detail::require_positive_probabilities(plan, d.n());
  if (profile.h.size() != d.n()) throw std::invalid_argument("profile does not match dataset");
  if (r < 1) throw std::invalid_argument("subsample size must be positive");
  double total = 0.0;
  for (Index i = 0; i < d.n(); ++i) {
    total += (1.0 - profile.h(i)) * profile.row_norms(i) * profile.row_norms(i) / plan.pi(i);
  }
  return total / static_cast<double>(r);
}

/// {sum_i sqrt(1 - h_ii) ||x_i||}^2 / r; the expected-trace objective attains
/// this exactly at the minimizing probabilities.
inline double holder_lower_bound(const LeverageProfile& profile, Index r) {
  if (r < 1) throw std::invalid_argument("subsample size must be positive");
  double s = 0.0;
  for (Index i = 0; i < profile.h.size(); ++i) {
    s += std::sqrt(std::max(1.0 - profile.h(i), 0.0)) * profile.row_norms(i);
  }
  return s * s / static_cast<double>(r);
}

inline Eigen::MatrixXd avar(const Eigen::MatrixXd& sigma_c_matrix, const Eigen::MatrixXd& gram_inv,
                            const Eigen::VectorXd& beta_hat, double lambda, Index r) {
  const Eigen::VectorXd m_beta = gram_inv * beta_hat;
  return sigma_c_matrix -
         (lambda * lambda / static_cast<double>(r)) * (m_beta * m_beta.transpose());
}

inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> ae_and_amse(
    const Eigen::VectorXd& beta_hat, double lambda, double lambda_tilde,
    const Eigen::MatrixXd& gram_inv, const Eigen::MatrixXd& sigma_c_matrix, Index r) {
  const Eigen::VectorXd m_beta = gram_inv * beta_hat;
  const Eigen::VectorXd ae = beta_hat + (lambda - lambda_tilde) * m_beta;
  const Eigen::MatrixXd rank_one = m_beta * m_beta.transpose();
  const Eigen::MatrixXd amse = sigma_c_matrix -
                               (lambda * lambda / static_cast<double>(r)) * rank_one +
                               (lambda - lambda_tilde) * (lambda - lambda_tilde) * rank_one;
  return {ae, amse};
}

inline TheoryReport make_theory_report(const Dataset& d, const RidgeFit& fit,
                                       const SamplingPlan& plan, Index r, double lambda_tilde) {
  TheoryReport report;
  report.r = r;
  report.lambda = fit.lambda;
  report.lambda_tilde = lambda_tilde;
  report.sigma_c = sigma_c(d, fit, plan, r);

  Eigen::MatrixXd A = d.X.transpose() * d.X;
  A.diagonal().array() += fit.lambda;
  const Eigen::MatrixXd gram_inv = A.llt().solve(Eigen::MatrixXd::Identity(d.p(), d.p()));

  report.avar = avar(report.sigma_c, gram_inv, fit.beta, fit.lambda, r);
  auto [ae_vec, amse_mat] = ae_and_amse(fit.beta, fit.lambda, lambda_tilde, gram_inv,
                                        report.sigma_c, r);
  report.ae = ae_vec;
  report.amse = amse_mat;

  // For tiny r the rank-one subtraction can push AVar numerically indefinite.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.avar, Eigen::EigenvaluesOnly);
  const double tol = 1e-12 * std::max(1.0, std::abs(es.eigenvalues().maxCoeff()));
  report.avar_positive_semidefinite = es.eigenvalues().minCoeff() >= -tol;
  return report;
}

struct DecayCheck {
  double slope = 0.0;
  std::vector<Index> r_grid;
  std::vector<double> median_remainder;
};

/// Monte Carlo check of the first-order expansion
/// beta_tilde - beta_hat = M X^T W e - lambda_tilde M beta_hat + O_p(r^-1):
/// fits subsamples at lambda_tilde = lambda over a grid of r, records the
/// median norm of the remainder and returns the log-log slope, which should
/// sit near -1.
inline DecayCheck first_order_decay_check(const Dataset& d, const SamplingPlan& plan, double lambda,
                                     const std::vector<Index>& r_grid, int replicates,
                                     std::uint64_t seed) {
  validate_dataset(d);
  detail::require_positive_probabilities(plan, d.n());
  if (replicates < 20) throw std::invalid_argument("insufficient replicates (< 20)");
  if (r_grid.size() < 2) throw std::invalid_argument("r grid needs at least two sizes");
  const auto [min_it, max_it] = std::minmax_element(r_grid.begin(), r_grid.end());
  if (*min_it < 1 || static_cast<double>(*max_it) < 10.0 * static_cast<double>(*min_it)) {
    throw std::invalid_argument("r grid must span at least a decade");
  }

  const RidgeFit full = ridge_solve(d, lambda);
  const RidgeSolver solver(d);
  const Eigen::MatrixXd M = solver.gram_inverse(lambda);
  const Eigen::VectorXd m_beta = M * full.beta;

  DecayCheck check;
  check.r_grid = r_grid;
  check.median_remainder.resize(r_grid.size());

  for (std::size_t g = 0; g < r_grid.size(); ++g) {
    const Index r = r_grid[g];
    std::vector<double> norms(static_cast<std::size_t>(replicates));
    parallel_for(replicates, [&](std::int64_t rep) {
      const std::uint64_t draw_seed =
          derive_seed(seed, static_cast<std::uint64_t>(g) * 1000003ULL + static_cast<std::uint64_t>(rep));
      const Subsample sub = draw(plan, r, draw_seed);
      const RidgeFit fit = weighted_ridge_solve(d, sub, lambda);

      // X^T W e accumulated over the distinct drawn rows only.
      Eigen::VectorXd xtwe = Eigen::VectorXd::Zero(d.p());
      const double rd = static_cast<double>(r);
      for (Index i = 0; i < d.n(); ++i) {
        const int k = sub.counts[static_cast<std::size_t>(i)];
        if (k > 0) {
          xtwe += (k / (rd * plan.pi(i))) * full.residuals(i) * d.X.row(i).transpose();
        }
      }
      const Eigen::VectorXd first_order = M * xtwe - lambda * m_beta;
      norms[static_cast<std::size_t>(rep)] = (fit.beta - full.beta - first_order).norm();
    });
    std::nth_element(norms.begin(), norms.begin() + norms.size() / 2, norms.end());
    double median = norms[norms.size() / 2];
    if (norms.size() % 2 == 0) {
      const double lower = *std::max_element(norms.begin(), norms.begin() + norms.size() / 2);
      median = 0.5 * (median + lower);
    }
    check.median_remainder[g] = median;
  }

  // Least-squares slope of log(median) on log(r).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(r_grid.size());
  for (std::size_t g = 0; g < r_grid.size(); ++g) {
    const double x = std::log(static_cast<double>(r_grid[g]));
    const double y = std::log(check.median_remainder[g]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  check.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return check;
}

}  // namespace ridgesub
