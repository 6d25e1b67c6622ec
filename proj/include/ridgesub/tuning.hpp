#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ridgesub/ridge.hpp"
#include "ridgesub/rng.hpp"
#include "ridgesub/samplers.hpp"

namespace ridgesub {

/// Strictly increasing grid of positive ridge parameters.
struct LambdaGrid {
  std::vector<double> values;

  static LambdaGrid logspace(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
      throw std::invalid_argument("grid needs 0 < lo < hi and at least two points");
    }
    LambdaGrid grid;
    grid.values.resize(static_cast<std::size_t>(count));
    const double step = (std::log10(hi) - std::log10(lo)) / (count - 1);
    for (int k = 0; k < count; ++k) {
      grid.values[static_cast<std::size_t>(k)] = std::pow(10.0, std::log10(lo) + step * k);
    }
    grid.values.front() = lo;
    grid.values.back() = hi;
    return grid;
  }

  /// 61 log-spaced values over [1e-4, 1e4]; spans under- to over-smoothing
  /// for standardized designs.
  static LambdaGrid default_grid() { return logspace(1e-4, 1e4, 61); }

  void validate() const {
    if (values.empty()) throw std::invalid_argument("empty lambda grid");
    double prev = 0.0;
    for (const double v : values) {
      if (!(v > prev) || !std::isfinite(v)) {
        throw std::invalid_argument("lambda grid must be positive and strictly increasing");
      }
      prev = v;
    }
  }
};

enum class TuneMethod { KFold, Loocv, Gcv };

inline const char* tune_method_name(TuneMethod m) {
  switch (m) {
    case TuneMethod::KFold: return "kfold";
    case TuneMethod::Loocv: return "loocv";
    case TuneMethod::Gcv: return "gcv";
  }
  return "unknown";
}

struct TuningResult {
  double lambda_star = 0.0;
  std::vector<std::pair<double, double>> criterion_curve;  // (lambda, score)
  TuneMethod method = TuneMethod::Gcv;
};

namespace detail {

/// Scans the curve for the minimum; equal scores resolve toward larger
/// lambda.
inline double argmin_prefer_larger(const std::vector<std::pair<double, double>>& curve) {
  double best_lambda = curve.front().first;
  double best_score = curve.front().second;
  for (const auto& [lambda, score] : curve) {
    if (!std::isfinite(score)) throw std::runtime_error("non-finite criterion score");
    if (score <= best_score) {
      best_score = score;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

}  // namespace detail

/// K-fold cross-validation: folds are a seeded random partition of near-equal
/// sizes, the score at each lambda is K^-1 sum_k ||y_k - X_k beta_(without k)||^2.
inline TuningResult kfold_cv(const Dataset& d, const LambdaGrid& grid, int K, std::uint64_t seed) {
  validate_dataset(d);
  grid.validate();
  if (K < 2) throw std::invalid_argument("K-fold needs K >= 2");
  if (d.n() < K) throw std::invalid_argument("fewer rows than folds");

  const Index n = d.n();
  const Index p = d.p();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  std::vector<std::vector<Index>> folds(static_cast<std::size_t>(K));
  for (Index i = 0; i < n; ++i) {
    folds[static_cast<std::size_t>(i % K)].push_back(order[static_cast<std::size_t>(i)]);
  }
  for (const auto& fold : folds) {
    if (fold.empty()) throw std::runtime_error("fold with zero rows");
  }

  const Eigen::MatrixXd gram = d.X.transpose() * d.X;
  const Eigen::VectorXd xty = d.X.transpose() * d.y;

  struct FoldData {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::MatrixXd gram_rest;
    Eigen::VectorXd xty_rest;
  };
  std::vector<FoldData> fold_data;
  fold_data.reserve(static_cast<std::size_t>(K));
  for (const auto& fold : folds) {
    FoldData fd;
    fd.X.resize(static_cast<Index>(fold.size()), p);
    fd.y.resize(static_cast<Index>(fold.size()));
    for (std::size_t k = 0; k < fold.size(); ++k) {
      fd.X.row(static_cast<Index>(k)) = d.X.row(fold[k]);
      fd.y(static_cast<Index>(k)) = d.y(fold[k]);
    }
    fd.gram_rest = gram - fd.X.transpose() * fd.X;
    fd.xty_rest = xty - fd.X.transpose() * fd.y;
    fold_data.push_back(std::move(fd));
  }

  TuningResult result;
  result.method = TuneMethod::KFold;
  for (const double lambda : grid.values) {
    double score = 0.0;
    for (const auto& fd : fold_data) {
      const Eigen::VectorXd beta = detail::solve_normal_equations(fd.gram_rest, fd.xty_rest, lambda);
      score += (fd.y - fd.X * beta).squaredNorm();
    }
    result.criterion_curve.emplace_back(lambda, score / K);
  }
  result.lambda_star = detail::argmin_prefer_larger(result.criterion_curve);
  return result;
}

/// Closed-form leave-one-out: score(lambda) = n^-1 sum_i {e_i / (1 - h_ii)}^2
/// with one full-data fit per lambda. Algebraically identical to n refits.
inline TuningResult loocv_shortcut(const Dataset& d, const LambdaGrid& grid) {
  validate_dataset(d);
  grid.validate();

  const RidgeSolver solver(d);
  // h_ii(lambda) = sum_j U_ij^2 / (d_j + lambda) with U = X V from one
  // eigendecomposition, so the whole grid costs one O(n p^2) pass.
  const Eigen::MatrixXd U = d.X * solver.eigenvectors();
  const Eigen::MatrixXd U2 = U.cwiseAbs2();

  TuningResult result;
  result.method = TuneMethod::Loocv;
  for (const double lambda : grid.values) {
    const Eigen::VectorXd beta = solver.solve(lambda);
    const Eigen::VectorXd e = d.y - d.X * beta;
    const Eigen::VectorXd h =
        U2 * (1.0 / (solver.eigenvalues().array() + lambda)).matrix();
    double score = 0.0;
    for (Index i = 0; i < d.n(); ++i) {
      if (h(i) >= 1.0) throw std::runtime_error("leverage score numerically >= 1");
      const double z = e(i) / (1.0 - h(i));
      score += z * z;
    }
    result.criterion_curve.emplace_back(lambda, score / static_cast<double>(d.n()));
  }
  result.lambda_star = detail::argmin_prefer_larger(result.criterion_curve);
  return result;
}

/// Generalized cross-validation: the leave-one-out score with every h_ii
/// replaced by its average tr(H)/n.
inline TuningResult gcv(const Dataset& d, const LambdaGrid& grid) {
  validate_dataset(d);
  grid.validate();

  const RidgeSolver solver(d);
  const double n = static_cast<double>(d.n());

  TuningResult result;
  result.method = TuneMethod::Gcv;
  for (const double lambda : grid.values) {
    const Eigen::VectorXd beta = solver.solve(lambda);
    const double rss = (d.y - d.X * beta).squaredNorm();
    const double avg_h = solver.trace_hat(lambda) / n;
    if (avg_h >= 1.0) throw std::runtime_error("average leverage numerically >= 1");
    const double denom = 1.0 - avg_h;
    result.criterion_curve.emplace_back(lambda, rss / (n * denom * denom));
  }
  result.lambda_star = detail::argmin_prefer_larger(result.criterion_curve);
  return result;
}

/// Tunes lambda on a subsample by applying the chosen criterion to the
/// weighted rows (Phi X*, Phi y*). Weights enter the fitting and scoring
/// only; fold assignment ignores them.
inline TuningResult tune_subsample(const Dataset& d, const Subsample& sub, const LambdaGrid& grid,
                                   TuneMethod method = TuneMethod::Gcv, int K = 5,
                                   std::uint64_t seed = 0) {
  auto [X_rows, y_rows] = gather(d, sub);
  if (X_rows.rows() < 1) throw std::invalid_argument("empty subsample");
  if (sub.weights.weights.size() != X_rows.rows()) {
    throw std::invalid_argument("subsample weights do not match row count");
  }
  Dataset weighted{sub.weights.weights.asDiagonal() * X_rows,
                   sub.weights.weights.cwiseProduct(y_rows)};
  switch (method) {
    case TuneMethod::KFold:
      if (weighted.n() < K) throw std::invalid_argument("subsample smaller than fold count");
      return kfold_cv(weighted, grid, K, seed);
    case TuneMethod::Loocv:
      return loocv_shortcut(weighted, grid);
    case TuneMethod::Gcv:
      return gcv(weighted, grid);
  }
  throw std::invalid_argument("unknown tuning method");
}

/// Writes the (lambda, score) curve as CSV for plotting.
inline void write_curve_csv(const TuningResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write curve CSV: " + path);
  out << "lambda,score\n";
  for (const auto& [lambda, score] : result.criterion_curve) {
    out << detail::format_double(lambda) << ',' << detail::format_double(score) << '\n';
  }
}

}  // namespace ridgesub
