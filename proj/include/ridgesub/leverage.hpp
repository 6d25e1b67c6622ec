#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

#include "ridgesub/ridge.hpp"

namespace ridgesub {

/// Diagonal of the ridge hat matrix X (X^T X + lambda I)^-1 X^T plus the row
/// norms needed by the sampling probability formulas.
struct LeverageProfile {
  Eigen::VectorXd h;
  double lambda = 0.0;
  double trace = 0.0;
  Eigen::VectorXd row_norms;
};

/// ||x_i||_2 per row. A single streaming pass; never touches the gram matrix.
inline Eigen::VectorXd row_norms(const Eigen::MatrixXd& X) {
  if (!X.allFinite()) throw std::invalid_argument("matrix contains non-finite entries");
  Eigen::VectorXd norms(X.rows());
  for (Index i = 0; i < X.rows(); ++i) norms(i) = X.row(i).norm();
  return norms;
}

inline Eigen::VectorXd row_norms(const Dataset& d) { return row_norms(d.X); }

namespace detail {

inline LeverageProfile leverage_impl(const Dataset& d, double lambda) {
  validate_dataset(d);
  const Eigen::MatrixXd gram = d.X.transpose() * d.X;
  Eigen::MatrixXd A = gram;
  A.diagonal().array() += lambda;
  if (lambda == 0.0) check_spd_conditioning(A);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("Cholesky factorization failed: system not positive definite");
  }

  LeverageProfile profile;
  profile.lambda = lambda;
  profile.h.resize(d.n());
  profile.row_norms = row_norms(d);

  // One p x p factorization, then n back-substitutions in row blocks so the
  // working set stays O(block * p) instead of O(n * p).
  constexpr Index kBlock = 4096;
  for (Index start = 0; start < d.n(); start += kBlock) {
    const Index len = std::min(kBlock, d.n() - start);
    const Eigen::MatrixXd solved = llt.solve(d.X.middleRows(start, len).transpose());
    profile.h.segment(start, len) =
        d.X.middleRows(start, len).cwiseProduct(solved.transpose()).rowwise().sum();
  }
  for (Index i = 0; i < d.n(); ++i) {
    if (profile.h(i) < 0.0) profile.h(i) = 0.0;  // round-off only
  }

  const Eigen::MatrixXd Ainv = llt.solve(Eigen::MatrixXd::Identity(d.p(), d.p()));
  profile.trace = Ainv.cwiseProduct(gram).sum();
  return profile;
}

}  // namespace detail

/// Exact ridge leverage scores h_ii = x_i^T (X^T X + lambda I)^-1 x_i,
/// computed in O(n p^2).
inline LeverageProfile exact_ridge_leverage(const Dataset& d, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ridge leverage requires lambda > 0");
  return detail::leverage_impl(d, lambda);
}

/// Unpenalized leverage scores, the diagonal of the least-squares projection
/// X (X^T X)^-1 X^T. Requires a well-conditioned gram matrix.
inline LeverageProfile unpenalized_leverage(const Dataset& d) {
  return detail::leverage_impl(d, 0.0);
}

/// n^-1 tr(H), the scalar the generalized cross-validation denominator and
/// the fast probability approximation both use in place of individual h_ii.
inline double average_leverage(const LeverageProfile& profile) {
  if (profile.h.size() == 0) throw std::invalid_argument("empty leverage profile");
  return profile.trace / static_cast<double>(profile.h.size());
}

/// max h_ii / mean h_ii. Diagnostic for how far the averaged-score
/// approximation strays from the exact scores; 1 means perfectly homogeneous.
inline double leverage_heterogeneity(const LeverageProfile& profile) {
  const double mean = profile.h.mean();
  if (!(mean > 0.0)) return 0.0;
  return profile.h.maxCoeff() / mean;
}

}  // namespace ridgesub
