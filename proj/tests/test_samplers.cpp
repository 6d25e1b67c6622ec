#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "ridgesub/samplers.hpp"
#include "ridgesub/theory.hpp"
#include "support.hpp"

using namespace ridgesub;

namespace {

/// Straight-line restatement of the extreme-value selection rule: repeated
/// linear scans for the smallest / largest unselected value, quota per column
/// first, then remainder pairs over the first columns.
std::vector<Index> iboss_oracle(const Eigen::MatrixXd& X, Index r) {
  const Index n = X.rows();
  const Index p = X.cols();
  std::vector<bool> sel(static_cast<std::size_t>(n), false);
  Index taken = 0;

  auto scan = [&](Index col, bool smallest) -> bool {
    Index best = -1;
    for (Index i = 0; i < n; ++i) {
      if (sel[static_cast<std::size_t>(i)]) continue;
      if (best < 0) {
        best = i;
        continue;
      }
      if (smallest ? X(i, col) < X(best, col) : X(i, col) > X(best, col)) best = i;
    }
    if (best < 0) return false;
    sel[static_cast<std::size_t>(best)] = true;
    ++taken;
    return true;
  };

  const Index quota = r / (2 * p);
  for (Index j = 0; j < p && taken < r; ++j) {
    for (Index k = 0; k < quota && taken < r; ++k) scan(j, true);
    for (Index k = 0; k < quota && taken < r; ++k) scan(j, false);
  }
  for (Index j = 0; taken < r; j = (j + 1) % p) {
    scan(j, true);
    if (taken < r) scan(j, false);
  }

  std::vector<Index> out;
  for (Index i = 0; i < n; ++i) {
    if (sel[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

double trace_objective_by_loop(const Eigen::MatrixXd& X, const Eigen::VectorXd& h,
                               const Eigen::VectorXd& pi, Index r) {
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    total += (1.0 - h(i)) * X.row(i).squaredNorm() / pi(i);
  }
  return total / static_cast<double>(r);
}

}  // namespace

TEST_SUITE("samplers") {

TEST_CASE("identical rows make the exact plan uniform") {
  Eigen::MatrixXd X(4, 2);
  for (Index i = 0; i < 4; ++i) X.row(i) << 1.0, 2.0;
  const Dataset d = make_dataset(X, Eigen::VectorXd::Ones(4));
  const LeverageProfile prof = exact_ridge_leverage(d, 1.0);
  const SamplingPlan plan = plan_ropt_exact(d, prof);
  for (Index i = 0; i < 4; ++i) CHECK(plan.pi(i) == doctest::Approx(0.25));
  CHECK(plan.strategy == Strategy::RoptAcc);
  CHECK(plan.lambda_used.value() == doctest::Approx(1.0));
}

TEST_CASE("a common sqrt(1-h) factor cancels") {
  LeverageProfile prof;
  prof.h.resize(2);
  prof.h << 0.5, 0.5;
  prof.row_norms.resize(2);
  prof.row_norms << 1.0, 2.0;
  prof.lambda = 1.0;
  prof.trace = 1.0;
  Eigen::MatrixXd X(2, 1);
  X << 1.0, 2.0;
  const SamplingPlan plan = plan_ropt_exact(make_dataset(X, Eigen::VectorXd::Ones(2)), prof);
  CHECK(plan.pi(0) == doctest::Approx(1.0 / 3.0));
  CHECK(plan.pi(1) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("exact plan minimizes the expected-trace objective") {
  Rng rng(60);
  const Dataset d = testsupport::random_instance(rng, 5, 2);
  const double lambda = 0.5;
  const LeverageProfile prof = exact_ridge_leverage(d, lambda);
  const SamplingPlan best = plan_ropt_exact(d, prof);
  const double best_value = trace_objective_by_loop(d.X, prof.h, best.pi, 10);

  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd raw(d.n());
    for (Index i = 0; i < d.n(); ++i) raw(i) = 0.01 + rng.uniform01();
    raw /= raw.sum();
    CHECK(trace_objective_by_loop(d.X, prof.h, raw, 10) >= best_value * (1.0 - 1e-12));
  }
}

TEST_CASE("approximate plan is proportional to row norms") {
  Eigen::MatrixXd X(2, 2);
  X << 1, 0, 2, 0;  // rows e1 and 2 e1
  Dataset d{X, Eigen::VectorXd::Ones(2)};
  const SamplingPlan plan = plan_ropt_approx(d);
  CHECK(plan.pi(0) == doctest::Approx(1.0 / 3.0));
  CHECK(plan.pi(1) == doctest::Approx(2.0 / 3.0));
  CHECK(!plan.lambda_used.has_value());
}

TEST_CASE("equal norms give the uniform approximate plan") {
  Eigen::MatrixXd X(3, 2);
  X << 1, 0, 0, 1, -1, 0;
  Dataset d{X, Eigen::VectorXd::Ones(3)};
  const SamplingPlan plan = plan_ropt_approx(d);
  for (Index i = 0; i < 3; ++i) CHECK(plan.pi(i) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("approximate equals exact when leverage is homogeneous") {
  Rng rng(61);
  const Dataset d = testsupport::equal_leverage_instance(rng, 4, 1.5);
  const LeverageProfile prof = exact_ridge_leverage(d, 0.9);
  const SamplingPlan exact = plan_ropt_exact(d, prof);
  const SamplingPlan approx = plan_ropt_approx(d);
  CHECK((exact.pi - approx.pi).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("approximate plan is scale invariant") {
  Rng rng(62);
  const Dataset d = testsupport::random_instance(rng, 12, 3);
  const SamplingPlan base = plan_ropt_approx(d);
  Dataset scaled{d.X * 37.5, d.y};
  const SamplingPlan after = plan_ropt_approx(scaled);
  CHECK((base.pi - after.pi).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("zero rows receive the floor probability") {
  Eigen::MatrixXd X(3, 2);
  X << 1, 0, 0, 0, 0, 2;
  Dataset d{X, Eigen::VectorXd::Ones(3)};
  const SamplingPlan plan = plan_ropt_approx(d);
  CHECK(plan.pi(1) > 0.0);
  CHECK(plan.pi.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rlev plan follows the leverage scores") {
  const Index n = 4;
  const Dataset ident = make_dataset(Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Ones(n));
  const SamplingPlan uniform = plan_rlev(exact_ridge_leverage(ident, 2.0));
  for (Index i = 0; i < n; ++i) CHECK(uniform.pi(i) == doctest::Approx(0.25));

  LeverageProfile prof;
  prof.h.resize(2);
  prof.h << 0.2, 0.6;
  prof.lambda = 1.0;
  prof.trace = 0.8;
  prof.row_norms = Eigen::VectorXd::Ones(2);
  const SamplingPlan plan = plan_rlev(prof);
  CHECK(plan.pi(0) == doctest::Approx(0.25));
  CHECK(plan.pi(1) == doctest::Approx(0.75));

  Rng rng(63);
  const Dataset d = testsupport::random_instance(rng, 25, 3);
  const LeverageProfile p2 = exact_ridge_leverage(d, 0.4);
  const SamplingPlan p2plan = plan_rlev(p2);
  const Eigen::VectorXd expected = p2.h / p2.h.sum();
  CHECK((p2plan.pi - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("uniform plan") {
  const SamplingPlan p4 = plan_runif(4);
  for (Index i = 0; i < 4; ++i) CHECK(p4.pi(i) == doctest::Approx(0.25));
  const SamplingPlan p1 = plan_runif(1);
  CHECK(p1.pi(0) == doctest::Approx(1.0));
  const SamplingPlan p7 = plan_runif(7);
  CHECK(p7.pi.sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("opt plan uses unpenalized leverage") {
  Rng rng(64);
  Eigen::MatrixXd G(4, 4);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) G(i, j) = rng.normal();
  }
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  const SamplingPlan orth = plan_opt_linear(make_dataset(Q, Eigen::VectorXd::Ones(4)));
  for (Index i = 0; i < 4; ++i) CHECK(orth.pi(i) == doctest::Approx(0.25));

  const Dataset d = testsupport::random_instance(rng, 12, 3);
  const LeverageProfile prof = unpenalized_leverage(d);
  CHECK(prof.h.sum() == doctest::Approx(3.0).epsilon(1e-8));
  const Eigen::MatrixXd H = testsupport::hat_matrix(d.X, 0.0);
  const SamplingPlan plan = plan_opt_linear(d);
  for (Index i = 0; i < d.n(); ++i) {
    CHECK(std::abs(plan.pi(i) - H(i, i) / H.trace()) < 1e-10);
  }
}

TEST_CASE("iboss takes the extremes of a single column") {
  Eigen::MatrixXd X(5, 1);
  X << 5, 1, 9, 3, 7;
  Dataset d{X, Eigen::VectorXd::Ones(5)};
  const Subsample sub = select_iboss(d, 4);
  std::set<double> values;
  for (const Index i : sub.indices) values.insert(X(i, 0));
  CHECK(values == std::set<double>{1.0, 3.0, 7.0, 9.0});
  CHECK(sub.weights.weights.size() == 4);
  CHECK(sub.weights.weights.minCoeff() == doctest::Approx(1.0));
  int total = 0;
  for (const int c : sub.counts) {
    CHECK((c == 0 || c == 1));
    total += c;
  }
  CHECK(total == 4);
}

TEST_CASE("iboss with r = n selects everything") {
  Rng rng(65);
  const Dataset d = testsupport::random_instance(rng, 9, 2);
  const Subsample sub = select_iboss(d, 9);
  CHECK(sub.indices.size() == 9);
}

TEST_CASE("iboss matches the straight-line oracle") {
  Rng rng(66);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd X(20, 2);
    for (Index i = 0; i < 20; ++i) {
      for (Index j = 0; j < 2; ++j) X(i, j) = rng.normal();
    }
    Dataset d{X, Eigen::VectorXd::Ones(20)};
    const Index r = 4 + static_cast<Index>(rng.uniform_index(10));
    const Subsample sub = select_iboss(d, r);
    CHECK(sub.indices == iboss_oracle(X, r));
  }
}

TEST_CASE("iboss is invariant to row order") {
  Rng rng(67);
  Eigen::MatrixXd X(12, 2);
  for (Index i = 0; i < 12; ++i) {
    for (Index j = 0; j < 2; ++j) X(i, j) = rng.normal();  // distinct values
  }
  Dataset d{X, Eigen::VectorXd::Ones(12)};
  const Subsample base = select_iboss(d, 6);

  std::vector<Index> perm{11, 3, 7, 0, 9, 5, 2, 10, 1, 8, 4, 6};
  Eigen::MatrixXd Xp(12, 2);
  for (Index i = 0; i < 12; ++i) Xp.row(i) = X.row(perm[static_cast<std::size_t>(i)]);
  Dataset dp{Xp, Eigen::VectorXd::Ones(12)};
  const Subsample permuted = select_iboss(dp, 6);

  std::set<std::pair<double, double>> rows_base, rows_perm;
  for (const Index i : base.indices) rows_base.insert({X(i, 0), X(i, 1)});
  for (const Index i : permuted.indices) rows_perm.insert({Xp(i, 0), Xp(i, 1)});
  CHECK(rows_base == rows_perm);
}

TEST_CASE("iboss rejects r > n") {
  Rng rng(68);
  const Dataset d = testsupport::random_instance(rng, 5, 1);
  CHECK_THROWS(select_iboss(d, 6));
}

TEST_CASE("draw is deterministic and near-deterministic plans stick to one row") {
  SamplingPlan plan;
  plan.pi.resize(2);
  plan.pi << 1.0 - 1e-9, 1e-9;
  plan.strategy = Strategy::Ropt;
  const Subsample a = draw(plan, 500, 5);
  const Subsample b = draw(plan, 500, 5);
  CHECK(a.indices == b.indices);
  CHECK(a.counts[0] == 500);
  CHECK(a.counts[0] + a.counts[1] == 500);
}

TEST_CASE("draw frequencies follow the plan") {
  SamplingPlan plan;
  plan.pi.resize(2);
  plan.pi << 0.3, 0.7;
  plan.strategy = Strategy::Ropt;
  const Index r = 100000;
  const Subsample sub = draw(plan, r, 77);
  CHECK(sub.counts[0] + sub.counts[1] == r);
  CHECK(std::abs(sub.counts[0] / static_cast<double>(r) - 0.3) < 0.01);
  CHECK(std::abs(sub.counts[1] / static_cast<double>(r) - 0.7) < 0.01);
  // Weights follow 1/sqrt(r pi) per draw.
  for (Index k = 0; k < 5; ++k) {
    const Index i = sub.indices[static_cast<std::size_t>(k)];
    CHECK(sub.weights.weights(k) ==
          doctest::Approx(1.0 / std::sqrt(static_cast<double>(r) * plan.pi(i))));
  }
}

TEST_CASE("draw weight diagonal has unit expectation") {
  Eigen::VectorXd raw(5);
  raw << 1.0, 2.0, 0.5, 1.5, 3.0;
  SamplingPlan plan;
  plan.pi = raw / raw.sum();
  plan.strategy = Strategy::Ropt;

  const Index r = 20;
  const int replicates = 100000;
  Eigen::VectorXd mean_w = Eigen::VectorXd::Zero(5);
  for (int rep = 0; rep < replicates; ++rep) {
    const Subsample sub = draw(plan, r, 1000 + static_cast<std::uint64_t>(rep));
    for (Index i = 0; i < 5; ++i) {
      mean_w(i) += sub.counts[static_cast<std::size_t>(i)] / (static_cast<double>(r) * plan.pi(i));
    }
  }
  mean_w /= static_cast<double>(replicates);
  for (Index i = 0; i < 5; ++i) CHECK(std::abs(mean_w(i) - 1.0) < 0.01);
}

TEST_CASE("draw refuses deterministic plans") {
  SamplingPlan iboss;
  iboss.strategy = Strategy::Iboss;
  CHECK_THROWS(draw(iboss, 10, 1));
}

TEST_CASE("every randomized plan is strictly positive and sums to one") {
  Rng rng(70);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = testsupport::random_instance(rng, 30, 4);
    const LeverageProfile prof = exact_ridge_leverage(d, 0.5);
    for (const SamplingPlan& plan :
         {plan_ropt_exact(d, prof), plan_ropt_approx(d), plan_rlev(prof), plan_runif(d.n()),
          plan_opt_linear(d)}) {
      CHECK(plan.pi.minCoeff() > 0.0);
      CHECK(std::abs(plan.pi.sum() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("strategy names round-trip") {
  for (const Strategy s : {Strategy::RoptAcc, Strategy::Ropt, Strategy::Rlev, Strategy::Runif,
                           Strategy::Opt, Strategy::Iboss}) {
    CHECK(strategy_from_name(strategy_name(s)) == s);
  }
  CHECK(strategy_from_name("ropt-acc") == Strategy::RoptAcc);
  CHECK(!strategy_from_name("bogus").has_value());
}

}  // TEST_SUITE
