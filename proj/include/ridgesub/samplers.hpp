#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ridgesub/leverage.hpp"
#include "ridgesub/ridge.hpp"
#include "ridgesub/rng.hpp"

namespace ridgesub {

enum class Strategy { RoptAcc, Ropt, Rlev, Runif, Opt, Iboss };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::RoptAcc: return "ROPT_ACC";
    case Strategy::Ropt: return "ROPT";
    case Strategy::Rlev: return "RLEV";
    case Strategy::Runif: return "RUNIF";
    case Strategy::Opt: return "OPT";
    case Strategy::Iboss: return "IBOSS";
  }
  return "UNKNOWN";
}

inline std::optional<Strategy> strategy_from_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  std::replace(name.begin(), name.end(), '-', '_');
  if (name == "ROPT_ACC") return Strategy::RoptAcc;
  if (name == "ROPT") return Strategy::Ropt;
  if (name == "RLEV") return Strategy::Rlev;
  if (name == "RUNIF") return Strategy::Runif;
  if (name == "OPT") return Strategy::Opt;
  if (name == "IBOSS") return Strategy::Iboss;
  return std::nullopt;
}

/// Per-row subsampling probabilities. Deterministic strategies (IBOSS) carry
/// no probabilities and leave `pi` empty.
struct SamplingPlan {
  Eigen::VectorXd pi;
  Strategy strategy = Strategy::Runif;
  std::optional<double> lambda_used;

  bool randomized() const { return strategy != Strategy::Iboss; }
};

/// A realized subsample: drawn row indices (with repetition for randomized
/// strategies), the multiplicity vector K, and the weight diagonal used by
/// the weighted fit.
struct Subsample {
  std::vector<Index> indices;
  std::vector<int> counts;
  Index r = 0;
  WeightDiag weights;
};

namespace detail {

/// Normalizes raw nonnegative scores into a probability vector, raising any
/// probability below 1e-8/n to that floor so every row stays reachable and no
/// weight becomes infinite.
inline Eigen::VectorXd finalize_probabilities(Eigen::VectorXd raw) {
  const Index n = raw.size();
  if (n < 1) throw std::invalid_argument("empty probability vector");
  if (!raw.allFinite() || raw.minCoeff() < 0.0) {
    throw std::invalid_argument("raw sampling scores must be finite and nonnegative");
  }
  const double total = raw.sum();
  if (!(total > 0.0)) throw std::invalid_argument("all sampling scores are zero");
  raw /= total;

  const double floor = 1e-8 / static_cast<double>(n);
  bool floored = false;
  for (Index i = 0; i < n; ++i) {
    if (raw(i) < floor) {
      raw(i) = floor;
      floored = true;
    }
  }
  if (floored) raw /= raw.sum();
  return raw;
}

}  // namespace detail

/// Minimum-variance probabilities: pi_i proportional to sqrt(1 - h_ii) ||x_i||
/// with h_ii the ridge leverage scores at the intended lambda.
inline SamplingPlan plan_ropt_exact(const Dataset& d, const LeverageProfile& profile) {
  if (profile.h.size() != d.n()) throw std::invalid_argument("leverage profile does not match dataset");
  if (!(profile.lambda > 0.0)) throw std::invalid_argument("profile must be computed at lambda > 0");
  Eigen::VectorXd raw(d.n());
  for (Index i = 0; i < d.n(); ++i) {
    // 1 - h can dip below zero only through round-off.
    raw(i) = std::sqrt(std::max(1.0 - profile.h(i), 0.0)) * profile.row_norms(i);
  }
  SamplingPlan plan;
  plan.pi = detail::finalize_probabilities(std::move(raw));
  plan.strategy = Strategy::RoptAcc;
  plan.lambda_used = profile.lambda;
  return plan;
}

/// Fast approximation: pi_i proportional to ||x_i||. Replaces each ridge
/// leverage score with the average, so no lambda and no leverage pass needed;
/// one streaming scan over the rows suffices.
inline SamplingPlan plan_ropt_approx(const Dataset& d) {
  SamplingPlan plan;
  plan.pi = detail::finalize_probabilities(row_norms(d));
  plan.strategy = Strategy::Ropt;
  return plan;
}

/// Ridge leverage score sampling: pi_i proportional to h_ii.
inline SamplingPlan plan_rlev(const LeverageProfile& profile) {
  if (!(profile.lambda > 0.0)) throw std::invalid_argument("profile must be computed at lambda > 0");
  SamplingPlan plan;
  plan.pi = detail::finalize_probabilities(profile.h);
  plan.strategy = Strategy::Rlev;
  plan.lambda_used = profile.lambda;
  return plan;
}

/// Uniform probabilities 1/n.
inline SamplingPlan plan_runif(Index n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  SamplingPlan plan;
  plan.pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  plan.strategy = Strategy::Runif;
  return plan;
}

/// Leverage-score sampling for unpenalized linear regression:
/// pi_i proportional to the diagonal of X (X^T X)^-1 X^T.
inline SamplingPlan plan_opt_linear(const Dataset& d) {
  const LeverageProfile profile = unpenalized_leverage(d);
  SamplingPlan plan;
  plan.pi = detail::finalize_probabilities(profile.h);
  plan.strategy = Strategy::Opt;
  plan.lambda_used = 0.0;
  return plan;
}

/// Deterministic extreme-value subdata selection. Cycling through the
/// columns, takes the floor(r/2p) not-yet-selected rows with the smallest and
/// the floor(r/2p) with the largest value in each column; any remainder is
/// distributed one extreme pair at a time over the first columns. Ties in a
/// column break toward the lower row index. Counts are 0/1 and the fit is
/// unweighted.
inline Subsample select_iboss(const Dataset& d, Index r) {
  validate_dataset(d);
  const Index n = d.n();
  const Index p = d.p();
  if (r < 1) throw std::invalid_argument("subsample size must be positive");
  if (r > n) throw std::invalid_argument("subsample size exceeds row count");
  if (r < 2 * p) {
    std::cerr << "ridgesub: IBOSS subsample size " << r << " is below the recommended 2p = "
              << 2 * p << "\n";
  }

  // Per-column orderings: ascending by (value, index) and descending by
  // value with the same low-index tie-break.
  std::vector<std::vector<Index>> asc(static_cast<std::size_t>(p));
  std::vector<std::vector<Index>> desc(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    auto& a = asc[static_cast<std::size_t>(j)];
    a.resize(static_cast<std::size_t>(n));
    std::iota(a.begin(), a.end(), Index{0});
    std::sort(a.begin(), a.end(), [&](Index lhs, Index rhs) {
      if (d.X(lhs, j) != d.X(rhs, j)) return d.X(lhs, j) < d.X(rhs, j);
      return lhs < rhs;
    });
    auto& b = desc[static_cast<std::size_t>(j)];
    b.resize(static_cast<std::size_t>(n));
    std::iota(b.begin(), b.end(), Index{0});
    std::sort(b.begin(), b.end(), [&](Index lhs, Index rhs) {
      if (d.X(lhs, j) != d.X(rhs, j)) return d.X(lhs, j) > d.X(rhs, j);
      return lhs < rhs;
    });
  }

  std::vector<bool> selected(static_cast<std::size_t>(n), false);
  std::vector<std::size_t> asc_pos(static_cast<std::size_t>(p), 0);
  std::vector<std::size_t> desc_pos(static_cast<std::size_t>(p), 0);
  Index taken = 0;

  auto take_from = [&](const std::vector<Index>& order, std::size_t& pos) -> bool {
    while (pos < order.size()) {
      const Index row = order[pos++];
      if (!selected[static_cast<std::size_t>(row)]) {
        selected[static_cast<std::size_t>(row)] = true;
        ++taken;
        return true;
      }
    }
    return false;
  };

  const Index quota = r / (2 * p);
  for (Index j = 0; j < p && taken < r; ++j) {
    for (Index k = 0; k < quota && taken < r; ++k) take_from(asc[static_cast<std::size_t>(j)], asc_pos[static_cast<std::size_t>(j)]);
    for (Index k = 0; k < quota && taken < r; ++k) take_from(desc[static_cast<std::size_t>(j)], desc_pos[static_cast<std::size_t>(j)]);
  }
  for (Index j = 0; taken < r; j = (j + 1) % p) {
    const bool got_low = take_from(asc[static_cast<std::size_t>(j)], asc_pos[static_cast<std::size_t>(j)]);
    bool got_high = false;
    if (taken < r) got_high = take_from(desc[static_cast<std::size_t>(j)], desc_pos[static_cast<std::size_t>(j)]);
    if (!got_low && !got_high && j == p - 1) break;  // every row selected
  }

  Subsample sub;
  sub.r = r;
  sub.counts.assign(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    if (selected[static_cast<std::size_t>(i)]) {
      sub.indices.push_back(i);
      sub.counts[static_cast<std::size_t>(i)] = 1;
    }
  }
  sub.weights.weights = Eigen::VectorXd::Ones(r);
  return sub;
}

/// r independent draws with replacement from categorical(pi); the counts
/// vector is then multinomial(r, pi). Each draw of row i carries weight
/// 1/sqrt(r pi_i). Deterministic given the seed.
inline Subsample draw(const SamplingPlan& plan, Index r, std::uint64_t seed) {
  if (!plan.randomized()) {
    throw std::invalid_argument("cannot draw from a deterministic (IBOSS) plan");
  }
  if (r < 1) throw std::invalid_argument("subsample size must be positive");
  const Index n = plan.pi.size();
  if (n < 1) throw std::invalid_argument("plan has no probabilities");

  std::vector<double> cumulative(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    acc += plan.pi(i);
    cumulative[static_cast<std::size_t>(i)] = acc;
  }
  cumulative.back() = 1.0;

  Subsample sub;
  sub.r = r;
  sub.indices.resize(static_cast<std::size_t>(r));
  sub.counts.assign(static_cast<std::size_t>(n), 0);
  sub.weights.weights.resize(r);
  sub.weights.pi.resize(r);

  Rng rng(seed);
  const double rd = static_cast<double>(r);
  for (Index k = 0; k < r; ++k) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const Index i = std::min<Index>(static_cast<Index>(it - cumulative.begin()), n - 1);
    sub.indices[static_cast<std::size_t>(k)] = i;
    sub.counts[static_cast<std::size_t>(i)] += 1;
    sub.weights.pi(k) = plan.pi(i);
    sub.weights.weights(k) = 1.0 / std::sqrt(rd * plan.pi(i));
  }
  return sub;
}

/// Materializes the drawn rows (X*, y*) in draw order.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> gather(const Dataset& d, const Subsample& sub) {
  Eigen::MatrixXd X(static_cast<Index>(sub.indices.size()), d.p());
  Eigen::VectorXd y(static_cast<Index>(sub.indices.size()));
  for (std::size_t k = 0; k < sub.indices.size(); ++k) {
    X.row(static_cast<Index>(k)) = d.X.row(sub.indices[k]);
    y(static_cast<Index>(k)) = d.y(sub.indices[k]);
  }
  return {std::move(X), std::move(y)};
}

/// Diagonal of W = Omega K, the full-data reweighting: W_i = K_i / (r pi_i).
inline Eigen::VectorXd w_diagonal(const SamplingPlan& plan, const Subsample& sub) {
  if (!plan.randomized()) throw std::invalid_argument("W form needs a randomized plan");
  const Index n = plan.pi.size();
  if (static_cast<Index>(sub.counts.size()) != n) {
    throw std::invalid_argument("subsample counts do not match plan length");
  }
  Eigen::VectorXd w(n);
  const double rd = static_cast<double>(sub.r);
  for (Index i = 0; i < n; ++i) {
    w(i) = sub.counts[static_cast<std::size_t>(i)] / (rd * plan.pi(i));
  }
  return w;
}

/// Fits the weighted subsample ridge estimator on the gathered rows.
inline RidgeFit weighted_ridge_solve(const Dataset& d, const Subsample& sub, double lambda_tilde) {
  auto [X_rows, y_rows] = gather(d, sub);
  return weighted_ridge_solve(X_rows, y_rows, sub.weights, lambda_tilde);
}

inline void write_plan_csv(const SamplingPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plan CSV: " + path);
  out << "index,pi\n";
  for (Index i = 0; i < plan.pi.size(); ++i) {
    out << i << ',' << detail::format_double(plan.pi(i)) << '\n';
  }
}

inline void write_subsample_csv(const Subsample& sub, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write subsample CSV: " + path);
  out << "index,count,weight\n";
  for (std::size_t k = 0; k < sub.indices.size(); ++k) {
    out << sub.indices[k] << ',' << sub.counts[static_cast<std::size_t>(sub.indices[k])] << ','
        << detail::format_double(sub.weights.weights(static_cast<Index>(k))) << '\n';
  }
}

}  // namespace ridgesub
