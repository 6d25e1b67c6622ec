#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

#include "ridgesub/dataset.hpp"

namespace ridgesub {

/// Condition number above which an unpenalized normal-equation solve is
/// refused instead of silently regularized.
inline constexpr double kConditionLimit = 1e12;

/// One fitted ridge (or weighted ridge) model. `residuals` refer to the data
/// the fit was computed on, `trace_H` is the trace of the corresponding hat
/// matrix.
struct RidgeFit {
  Eigen::VectorXd beta;
  double lambda = 0.0;
  Eigen::VectorXd residuals;
  double trace_H = 0.0;
};

/// Per-draw inverse-probability weights 1/sqrt(r*pi_k) together with the
/// probabilities they came from. For deterministic (unweighted) subsamples
/// all weights are 1 and `pi` is empty.
struct WeightDiag {
  Eigen::VectorXd weights;
  Eigen::VectorXd pi;
};

namespace detail {

inline void check_spd_conditioning(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
  const double max_ev = es.eigenvalues().maxCoeff();
  const double min_ev = es.eigenvalues().minCoeff();
  if (!(min_ev > 0.0) || max_ev / min_ev > kConditionLimit) {
    throw std::runtime_error("normal equations singular at lambda = 0 (condition number beyond 1e12)");
  }
}

/// Solves (gram + lambda I) beta = xty by Cholesky; gram + lambda I is SPD
/// for lambda > 0. At lambda = 0 the system is condition-checked first.
inline Eigen::VectorXd solve_normal_equations(const Eigen::MatrixXd& gram,
                                              const Eigen::VectorXd& xty, double lambda) {
  Eigen::MatrixXd A = gram;
  A.diagonal().array() += lambda;
  if (lambda == 0.0) check_spd_conditioning(A);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("Cholesky factorization failed: system not positive definite");
  }
  return llt.solve(xty);
}

/// tr(H) = tr((gram + lambda I)^-1 gram) without forming H.
inline double trace_hat_from_gram(const Eigen::MatrixXd& gram, double lambda) {
  Eigen::MatrixXd A = gram;
  A.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("Cholesky factorization failed: system not positive definite");
  }
  const Eigen::MatrixXd Ainv = llt.solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
  return Ainv.cwiseProduct(gram).sum();
}

}  // namespace detail

/// Full-sample ridge estimator (X^T X + lambda I)^-1 X^T y.
inline RidgeFit ridge_solve(const Dataset& d, double lambda) {
  validate_dataset(d);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and nonnegative");
  }
  const Eigen::MatrixXd gram = d.X.transpose() * d.X;
  const Eigen::VectorXd xty = d.X.transpose() * d.y;

  RidgeFit fit;
  fit.lambda = lambda;
  fit.beta = detail::solve_normal_equations(gram, xty, lambda);
  fit.residuals = d.y - d.X * fit.beta;
  fit.trace_H = detail::trace_hat_from_gram(gram, lambda);
  return fit;
}

/// Weighted subsample ridge estimator: minimizes
/// ||Phi y* - Phi X* beta||^2 + lambda ||beta||^2 over the gathered rows.
/// Residuals and tr(H) refer to the weighted rows (Phi X*, Phi y*).
inline RidgeFit weighted_ridge_solve(const Eigen::MatrixXd& X_rows, const Eigen::VectorXd& y_rows,
                                     const WeightDiag& phi, double lambda_tilde) {
  const Index r = X_rows.rows();
  if (r < 1) throw std::invalid_argument("subsample is empty");
  if (y_rows.size() != r || phi.weights.size() != r) {
    throw std::invalid_argument("subsample rows, response and weights disagree in length");
  }
  if (!(phi.weights.minCoeff() > 0.0) || !phi.weights.allFinite()) {
    throw std::invalid_argument("weights must be strictly positive and finite");
  }
  if (!(lambda_tilde >= 0.0) || !std::isfinite(lambda_tilde)) {
    throw std::invalid_argument("lambda must be finite and nonnegative");
  }
  if (!X_rows.allFinite() || !y_rows.allFinite()) {
    throw std::invalid_argument("subsample contains non-finite entries");
  }

  const Eigen::MatrixXd Xw = phi.weights.asDiagonal() * X_rows;
  const Eigen::VectorXd yw = phi.weights.cwiseProduct(y_rows);
  const Eigen::MatrixXd gram = Xw.transpose() * Xw;
  const Eigen::VectorXd xty = Xw.transpose() * yw;

  RidgeFit fit;
  fit.lambda = lambda_tilde;
  fit.beta = detail::solve_normal_equations(gram, xty, lambda_tilde);
  fit.residuals = yw - Xw * fit.beta;
  fit.trace_H = detail::trace_hat_from_gram(gram, lambda_tilde);
  return fit;
}

/// Full-data form of the subsample estimator,
/// (X^T W X + lambda I)^-1 X^T W y with W = diag{K_i / (r pi_i)}. Agrees with
/// weighted_ridge_solve on the gathered rows; kept as the independent route
/// for cross-checks and the asymptotic expansions.
inline Eigen::VectorXd ridge_solve_wform(const Dataset& d, const Eigen::VectorXd& w_diag,
                                         double lambda_tilde) {
  validate_dataset(d);
  if (w_diag.size() != d.n()) throw std::invalid_argument("W diagonal length must equal n");
  if (!w_diag.allFinite() || w_diag.minCoeff() < 0.0) {
    throw std::invalid_argument("W diagonal must be finite and nonnegative");
  }
  const Eigen::MatrixXd WX = w_diag.asDiagonal() * d.X;
  const Eigen::MatrixXd gram = d.X.transpose() * WX;
  const Eigen::VectorXd xty = WX.transpose() * d.y;
  return detail::solve_normal_equations(gram, xty, lambda_tilde);
}

/// e_i = y_i - x_i^T beta.
inline Eigen::VectorXd residuals(const Dataset& d, const RidgeFit& fit) {
  if (fit.beta.size() != d.p()) throw std::invalid_argument("coefficient length does not match p");
  return d.y - d.X * fit.beta;
}

/// Caches X^T X and its eigendecomposition so that solves, hat traces and
/// gram inverses for many lambda values cost O(p^2) each. The eigenvalues of
/// the gram matrix are the squared singular values of X.
class RidgeSolver {
 public:
  explicit RidgeSolver(const Dataset& d) : RidgeSolver(d.X.transpose() * d.X, d.X.transpose() * d.y) {}

  RidgeSolver(Eigen::MatrixXd gram, Eigen::VectorXd xty)
      : gram_(std::move(gram)), xty_(std::move(xty)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition of gram failed");
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
    // Round-off can push the smallest eigenvalue of a PSD gram slightly
    // negative; clamp it so downstream square roots stay defined.
    const double floor = -1e-10 * std::max(1.0, eigenvalues_.maxCoeff());
    for (Index j = 0; j < eigenvalues_.size(); ++j) {
      if (eigenvalues_(j) < floor) throw std::runtime_error("gram matrix is not positive semidefinite");
      if (eigenvalues_(j) < 0.0) eigenvalues_(j) = 0.0;
    }
    vt_xty_ = eigenvectors_.transpose() * xty_;
  }

  Eigen::VectorXd solve(double lambda) const {
    check_lambda(lambda);
    return eigenvectors_ * (vt_xty_.array() / (eigenvalues_.array() + lambda)).matrix();
  }

  double trace_hat(double lambda) const {
    check_lambda(lambda);
    return (eigenvalues_.array() / (eigenvalues_.array() + lambda)).sum();
  }

  Eigen::MatrixXd gram_inverse(double lambda) const {
    check_lambda(lambda);
    return eigenvectors_ * (1.0 / (eigenvalues_.array() + lambda)).matrix().asDiagonal() *
           eigenvectors_.transpose();
  }

  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& xty() const { return xty_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

 private:
  void check_lambda(double lambda) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw std::invalid_argument("lambda must be finite and nonnegative");
    }
    if (lambda == 0.0) {
      const double min_ev = eigenvalues_.minCoeff();
      if (!(min_ev > 0.0) || eigenvalues_.maxCoeff() / min_ev > kConditionLimit) {
        throw std::runtime_error("normal equations singular at lambda = 0 (condition number beyond 1e12)");
      }
    }
  }

  Eigen::MatrixXd gram_;
  Eigen::VectorXd xty_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd vt_xty_;
};

}  // namespace ridgesub
