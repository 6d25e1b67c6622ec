#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <utility>

#include "ridgesub/dataset.hpp"
#include "ridgesub/parallel.hpp"
#include "ridgesub/rng.hpp"

namespace ridgesub {

enum class AuxFamily { Normal, LogNormal, StudentT2 };

/// One of the six synthetic settings: q informative columns drawn from
/// N(0, Sigma) with Sigma_ij = 0.5^{1(i != j)}, p - q auxiliary columns drawn
/// i.i.d. from the family the case selects, and y built from the informative
/// block alone plus N(0, noise_sd^2) errors.
struct SimConfig {
  Index n = 100000;
  Index p = 50;
  Index q = 10;
  int case_id = 1;
  double noise_sd = 3.0;
  std::uint64_t seed = 0;
};

struct SimTruth {
  Eigen::VectorXd beta_true;          // q ones followed by p - q zeros
  Eigen::MatrixXd sigma_informative;  // q x q, unit diagonal, 0.5 off-diagonal
};

/// Cases 1/4 use normal auxiliaries, 2/5 lognormal, 3/6 Student t with 2
/// degrees of freedom.
inline AuxFamily case_family(int case_id) {
  switch ((case_id - 1) % 3) {
    case 0: return AuxFamily::Normal;
    case 1: return AuxFamily::LogNormal;
    default: return AuxFamily::StudentT2;
  }
}

/// Informative dimension the paper pairs with each case at its native scale
/// (p = 50): 10 for cases 1-3, 25 for cases 4-6.
inline Index case_default_q(int case_id) { return case_id <= 3 ? 10 : 25; }

inline SimConfig make_case_config(int case_id, Index n, Index p, Index q, std::uint64_t seed,
                                  double noise_sd = 3.0) {
  if (case_id < 1 || case_id > 6) throw std::invalid_argument("case id must lie in 1..6");
  SimConfig cfg;
  cfg.case_id = case_id;
  cfg.n = n;
  cfg.p = p;
  cfg.q = q;
  cfg.seed = seed;
  cfg.noise_sd = noise_sd;
  return cfg;
}

inline SimConfig paper_case(int case_id, std::uint64_t seed) {
  return make_case_config(case_id, 100000, 50, case_default_q(case_id), seed);
}

inline void validate_config(const SimConfig& cfg) {
  if (cfg.case_id < 1 || cfg.case_id > 6) throw std::invalid_argument("case id must lie in 1..6");
  if (cfg.n < 1 || cfg.p < 1) throw std::invalid_argument("n and p must be positive");
  if (cfg.q < 1 || cfg.q > cfg.p) throw std::invalid_argument("q must lie in 1..p");
  if (!(cfg.noise_sd >= 0.0)) throw std::invalid_argument("noise sd must be nonnegative");
}

/// Generates a dataset for the given case. Rows are seeded individually, so
/// the output is bit-identical for any worker count or row blocking.
inline std::pair<Dataset, SimTruth> generate(const SimConfig& cfg) {
  validate_config(cfg);
  const Index n = cfg.n;
  const Index p = cfg.p;
  const Index q = cfg.q;

  SimTruth truth;
  truth.beta_true = Eigen::VectorXd::Zero(p);
  truth.beta_true.head(q).setOnes();
  truth.sigma_informative = Eigen::MatrixXd::Constant(q, q, 0.5);
  truth.sigma_informative.diagonal().setOnes();

  const Eigen::MatrixXd chol = truth.sigma_informative.llt().matrixL();
  const AuxFamily family = case_family(cfg.case_id);

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  parallel_for(n, [&](std::int64_t i) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd z(q);
    for (Index j = 0; j < q; ++j) z(j) = rng.normal();
    const Eigen::VectorXd informative = chol * z;
    X.row(i).head(q) = informative.transpose();
    for (Index j = q; j < p; ++j) {
      switch (family) {
        case AuxFamily::Normal: X(i, j) = rng.normal(); break;
        case AuxFamily::LogNormal: X(i, j) = rng.lognormal(); break;
        case AuxFamily::StudentT2: X(i, j) = rng.student_t2(); break;
      }
    }
    y(i) = informative.sum() + cfg.noise_sd * rng.normal();
  });

  return {make_dataset(std::move(X), std::move(y)), std::move(truth)};
}

}  // namespace ridgesub
