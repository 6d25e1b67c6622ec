#pragma once

// Test-only oracles. Everything here is deliberately written as plain loops,
// independent of the library's solve paths, so the two routes can disagree.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ridgesub/dataset.hpp"
#include "ridgesub/rng.hpp"

namespace testsupport {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Dense inverse by Gauss-Jordan elimination with partial pivoting.
inline MatrixXd gauss_inverse(MatrixXd a) {
  const Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("gauss_inverse: square matrix required");
  MatrixXd inv = MatrixXd::Identity(n, n);
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    for (Index row = col + 1; row < n; ++row) {
      if (std::abs(a(row, col)) > std::abs(a(pivot, col))) pivot = row;
    }
    if (a(pivot, col) == 0.0) throw std::runtime_error("gauss_inverse: singular matrix");
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      inv.row(pivot).swap(inv.row(col));
    }
    const double d = a(col, col);
    a.row(col) /= d;
    inv.row(col) /= d;
    for (Index row = 0; row < n; ++row) {
      if (row == col) continue;
      const double f = a(row, col);
      if (f != 0.0) {
        a.row(row) -= f * a.row(col);
        inv.row(row) -= f * inv.row(col);
      }
    }
  }
  return inv;
}

/// Ridge coefficients through the dense-inverse route.
inline VectorXd ridge_by_inverse(const MatrixXd& X, const VectorXd& y, double lambda) {
  MatrixXd A = X.transpose() * X;
  A.diagonal().array() += lambda;
  return gauss_inverse(A) * (X.transpose() * y);
}

/// Full hat matrix X (X^T X + lambda I)^-1 X^T, formed explicitly.
inline MatrixXd hat_matrix(const MatrixXd& X, double lambda) {
  MatrixXd A = X.transpose() * X;
  A.diagonal().array() += lambda;
  return X * gauss_inverse(A) * X.transpose();
}

/// Random dense instance with y = X beta + noise.
inline ridgesub::Dataset random_instance(ridgesub::Rng& rng, Index n, Index p,
                                         double noise_sd = 1.0) {
  MatrixXd X(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) X(i, j) = rng.normal();
  }
  VectorXd beta(p);
  for (Index j = 0; j < p; ++j) beta(j) = rng.normal();
  VectorXd y = X * beta;
  for (Index i = 0; i < n; ++i) y(i) += noise_sd * rng.normal();
  return ridgesub::make_dataset(std::move(X), std::move(y));
}

/// n rows with identical leverage scores and norms: two stacked copies of a
/// scaled orthogonal matrix.
inline ridgesub::Dataset equal_leverage_instance(ridgesub::Rng& rng, Index p, double scale) {
  MatrixXd G(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) G(i, j) = rng.normal();
  }
  const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(G).householderQ();
  MatrixXd X(2 * p, p);
  X.topRows(p) = scale * Q;
  X.bottomRows(p) = scale * Q.transpose();
  VectorXd y(2 * p);
  for (Index i = 0; i < 2 * p; ++i) y(i) = rng.normal();
  return ridgesub::make_dataset(std::move(X), std::move(y));
}

/// Literal leave-one-out score at one lambda: n refits via the dense-inverse
/// route.
inline double literal_loocv_score(const ridgesub::Dataset& d, double lambda) {
  const Index n = d.n();
  double score = 0.0;
  for (Index i = 0; i < n; ++i) {
    MatrixXd X(n - 1, d.p());
    VectorXd y(n - 1);
    Index row = 0;
    for (Index k = 0; k < n; ++k) {
      if (k == i) continue;
      X.row(row) = d.X.row(k);
      y(row) = d.y(k);
      ++row;
    }
    const VectorXd beta = ridge_by_inverse(X, y, lambda);
    const double e = d.y(i) - d.X.row(i).dot(beta);
    score += e * e;
  }
  return score / static_cast<double>(n);
}

inline double relative_error(const VectorXd& got, const VectorXd& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

inline double relative_error(const MatrixXd& got, const MatrixXd& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

inline double pearson(const VectorXd& a, const VectorXd& b) {
  const VectorXd ac = a.array() - a.mean();
  const VectorXd bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

}  // namespace testsupport
