#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ridgesub/dataset.hpp"
#include "ridgesub/leverage.hpp"
#include "ridgesub/parallel.hpp"
#include "ridgesub/ridge.hpp"
#include "ridgesub/samplers.hpp"
#include "ridgesub/simgen.hpp"
#include "ridgesub/theory.hpp"
#include "ridgesub/tuning.hpp"

namespace ridgesub {

enum class LambdaPolicy { SubsampleGcv, SubsampleKfold, Fixed };

inline const char* lambda_policy_name(LambdaPolicy policy) {
  switch (policy) {
    case LambdaPolicy::SubsampleGcv: return "subsample-gcv";
    case LambdaPolicy::SubsampleKfold: return "subsample-kfold";
    case LambdaPolicy::Fixed: return "fixed";
  }
  return "unknown";
}

inline std::optional<LambdaPolicy> lambda_policy_from_name(const std::string& name) {
  if (name == "gcv" || name == "subsample-gcv") return LambdaPolicy::SubsampleGcv;
  if (name == "kfold" || name == "subsample-kfold") return LambdaPolicy::SubsampleKfold;
  if (name == "fixed") return LambdaPolicy::Fixed;
  return std::nullopt;
}

struct CsvSource {
  std::string path;
  std::string response_column;
  std::vector<std::string> drop_columns;
};

/// Full description of one experiment. Exactly one of `sim` / `csv` is set.
struct ExperimentSpec {
  std::optional<SimConfig> sim;
  std::optional<CsvSource> csv;
  double train_fraction = 0.7;  // real-data protocol only

  std::vector<Strategy> methods;
  std::vector<Index> r_grid;
  int replicates = 20;

  LambdaPolicy lambda_policy = LambdaPolicy::SubsampleGcv;
  double fixed_lambda = 1.0;
  int kfold_k = 5;
  LambdaGrid lambda_grid = LambdaGrid::default_grid();

  std::uint64_t seed = 0;
  /// When set, the full-sample reference fit uses this lambda; otherwise it
  /// uses the lambda extrapolated from the subsample (the tuned lambda_tilde).
  std::optional<double> reference_lambda;
};

/// One (method, r, replicate) outcome. Metrics that do not apply stay NaN and
/// are omitted from the CSV. Timings go to the JSON report only, so CSV
/// output stays byte-identical across runs.
struct ReplicateRecord {
  Strategy method = Strategy::Runif;
  Index r = 0;
  int replicate = 0;
  std::uint64_t seed = 0;

  double lambda_tilde = std::numeric_limits<double>::quiet_NaN();
  double lambda_full_gcv = std::numeric_limits<double>::quiet_NaN();
  double mse_true = std::numeric_limits<double>::quiet_NaN();
  double mse_full = std::numeric_limits<double>::quiet_NaN();
  double test_error = std::numeric_limits<double>::quiet_NaN();

  double plan_seconds = 0.0;
  double solve_seconds = 0.0;
  std::string note;  // failure diagnostics for this cell, empty on success
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<ReplicateRecord> records;
  std::map<std::string, std::string> metadata;
};

/// Per-(method, r) summaries. Everything here is recomputable from the
/// records alone.
struct CellAggregate {
  Strategy method = Strategy::Runif;
  Index r = 0;
  int count = 0;

  double mean_mse_true = std::numeric_limits<double>::quiet_NaN();
  double median_mse_true = std::numeric_limits<double>::quiet_NaN();
  double mean_mse_full = std::numeric_limits<double>::quiet_NaN();
  double median_mse_full = std::numeric_limits<double>::quiet_NaN();
  double mean_test_error = std::numeric_limits<double>::quiet_NaN();
  double median_test_error = std::numeric_limits<double>::quiet_NaN();
  double median_lambda_tilde = std::numeric_limits<double>::quiet_NaN();
  double median_lambda_gap = std::numeric_limits<double>::quiet_NaN();  // |lambda_tilde - lambda_full_gcv|
};

namespace detail {

inline double median_of(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

inline double mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const double v : values) s += v;
  return s / static_cast<double>(values.size());
}

}  // namespace detail

inline std::vector<CellAggregate> aggregate(const std::vector<ReplicateRecord>& records) {
  std::vector<std::pair<Strategy, Index>> order;
  for (const auto& rec : records) {
    const std::pair<Strategy, Index> key{rec.method, rec.r};
    if (std::find(order.begin(), order.end(), key) == order.end()) order.push_back(key);
  }

  std::vector<CellAggregate> cells;
  for (const auto& [method, r] : order) {
    CellAggregate cell;
    cell.method = method;
    cell.r = r;
    std::vector<double> mse_true, mse_full, test_error, lambda_tilde, gaps;
    for (const auto& rec : records) {
      if (rec.method != method || rec.r != r) continue;
      ++cell.count;
      if (std::isfinite(rec.mse_true)) mse_true.push_back(rec.mse_true);
      if (std::isfinite(rec.mse_full)) mse_full.push_back(rec.mse_full);
      if (std::isfinite(rec.test_error)) test_error.push_back(rec.test_error);
      if (std::isfinite(rec.lambda_tilde)) lambda_tilde.push_back(rec.lambda_tilde);
      if (std::isfinite(rec.lambda_tilde) && std::isfinite(rec.lambda_full_gcv)) {
        gaps.push_back(std::abs(rec.lambda_tilde - rec.lambda_full_gcv));
      }
    }
    cell.mean_mse_true = detail::mean_of(mse_true);
    cell.median_mse_true = detail::median_of(mse_true);
    cell.mean_mse_full = detail::mean_of(mse_full);
    cell.median_mse_full = detail::median_of(mse_full);
    cell.mean_test_error = detail::mean_of(test_error);
    cell.median_test_error = detail::median_of(test_error);
    cell.median_lambda_tilde = detail::median_of(lambda_tilde);
    cell.median_lambda_gap = detail::median_of(gaps);
    cells.push_back(cell);
  }
  return cells;
}

/// Diagnostic, not a failure: per method, the median distance to the
/// full-sample fit should not increase with r. Returns one message per
/// violation.
inline std::vector<std::string> monotone_trend_flags(const std::vector<ReplicateRecord>& records) {
  std::vector<std::string> flags;
  const std::vector<CellAggregate> cells = aggregate(records);
  std::vector<Strategy> methods;
  for (const auto& cell : cells) {
    if (std::find(methods.begin(), methods.end(), cell.method) == methods.end()) {
      methods.push_back(cell.method);
    }
  }
  for (const Strategy method : methods) {
    const CellAggregate* prev = nullptr;
    for (const auto& cell : cells) {
      if (cell.method != method || !std::isfinite(cell.median_mse_full)) continue;
      if (prev && cell.median_mse_full > prev->median_mse_full) {
        std::ostringstream msg;
        msg << strategy_name(method) << ": median_mse_full rose from " << prev->median_mse_full
            << " (r=" << prev->r << ") to " << cell.median_mse_full << " (r=" << cell.r << ")";
        flags.push_back(msg.str());
      }
      prev = &cell;
    }
  }
  return flags;
}

/// Audit serializations (index, pi-or-count, weight) and the diagnostics
/// report, JSON flavors.
inline nlohmann::json plan_to_json(const SamplingPlan& plan) {
  nlohmann::json j;
  j["strategy"] = strategy_name(plan.strategy);
  if (plan.lambda_used) j["lambda_used"] = *plan.lambda_used;
  j["pi"] = std::vector<double>(plan.pi.data(), plan.pi.data() + plan.pi.size());
  return j;
}

inline nlohmann::json subsample_to_json(const Subsample& sub) {
  nlohmann::json j;
  j["r"] = sub.r;
  j["indices"] = sub.indices;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < sub.indices.size(); ++k) {
    rows.push_back({{"index", sub.indices[k]},
                    {"count", sub.counts[static_cast<std::size_t>(sub.indices[k])]},
                    {"weight", sub.weights.weights(static_cast<Index>(k))}});
  }
  j["draws"] = std::move(rows);
  return j;
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json theory_report_to_json(const TheoryReport& report) {
  nlohmann::json j;
  j["r"] = report.r;
  j["lambda"] = report.lambda;
  j["lambda_tilde"] = report.lambda_tilde;
  j["sigma_c"] = matrix_to_json(report.sigma_c);
  j["avar"] = matrix_to_json(report.avar);
  j["amse"] = matrix_to_json(report.amse);
  j["ae"] = std::vector<double>(report.ae.data(), report.ae.data() + report.ae.size());
  j["avar_positive_semidefinite"] = report.avar_positive_semidefinite;
  return j;
}

namespace detail {

inline void validate_spec(const ExperimentSpec& spec, Index n_train, bool allow_full_draw) {
  if (spec.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (spec.r_grid.empty()) throw std::invalid_argument("empty subsample size grid");
  Index prev = 0;
  for (const Index r : spec.r_grid) {
    if (r <= prev) throw std::invalid_argument("r grid must be strictly increasing");
    prev = r;
  }
  // Simulations may draw the full sample (r = n); the held-out protocol
  // requires a strict subsample of the training split.
  if (spec.r_grid.back() > n_train || (!allow_full_draw && spec.r_grid.back() == n_train)) {
    throw std::invalid_argument("subsample size exceeds training size");
  }
  spec.lambda_grid.validate();
  if (spec.kfold_k < 2) throw std::invalid_argument("K-fold needs K >= 2");
  if (spec.lambda_policy == LambdaPolicy::Fixed &&
      (!(spec.fixed_lambda >= 0.0) || !std::isfinite(spec.fixed_lambda))) {
    throw std::invalid_argument("fixed lambda must be finite and nonnegative");
  }
}

inline std::uint64_t cell_stream(int replicate, std::size_t method_idx, std::size_t r_idx) {
  return (static_cast<std::uint64_t>(replicate) << 20) |
         (static_cast<std::uint64_t>(method_idx) << 10) | static_cast<std::uint64_t>(r_idx);
}

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

/// Runs every (method, r) cell of one replicate on `data` and writes the
/// outcomes into `records` at the deterministic slot layout
/// (method_idx * |r_grid| + r_idx) * replicates + replicate.
inline void run_replicate_cells(const ExperimentSpec& spec, const Dataset& data,
                                const Dataset* test, const Eigen::VectorXd* beta_target,
                                int replicate, std::vector<ReplicateRecord>& records) {
  const std::size_t n_r = spec.r_grid.size();

  const RidgeSolver solver(data);
  const double lambda_full_gcv = gcv(data, spec.lambda_grid).lambda_star;

  const bool needs_profile =
      std::find(spec.methods.begin(), spec.methods.end(), Strategy::RoptAcc) != spec.methods.end() ||
      std::find(spec.methods.begin(), spec.methods.end(), Strategy::Rlev) != spec.methods.end();
  std::optional<LeverageProfile> profile;
  if (needs_profile) profile = exact_ridge_leverage(data, lambda_full_gcv);

  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    const Strategy method = spec.methods[mi];

    Clock plan_clock;
    std::optional<SamplingPlan> plan;
    std::string plan_error;
    try {
      switch (method) {
        case Strategy::RoptAcc: plan = plan_ropt_exact(data, *profile); break;
        case Strategy::Ropt: plan = plan_ropt_approx(data); break;
        case Strategy::Rlev: plan = plan_rlev(*profile); break;
        case Strategy::Runif: plan = plan_runif(data.n()); break;
        case Strategy::Opt: plan = plan_opt_linear(data); break;
        case Strategy::Iboss: break;  // deterministic, no plan
      }
    } catch (const std::exception& e) {
      plan_error = e.what();
    }
    const double plan_seconds = plan_clock.seconds();

    for (std::size_t ri = 0; ri < n_r; ++ri) {
      const Index r = spec.r_grid[ri];
      ReplicateRecord rec;
      rec.method = method;
      rec.r = r;
      rec.replicate = replicate;
      rec.seed = derive_seed(spec.seed, cell_stream(replicate, mi, ri));
      rec.lambda_full_gcv = lambda_full_gcv;
      rec.plan_seconds = plan_seconds;

      if (!plan_error.empty()) {
        rec.note = plan_error;
      } else {
        try {
          Clock solve_clock;
          const Subsample sub =
              method == Strategy::Iboss ? select_iboss(data, r) : draw(*plan, r, rec.seed);

          double lambda_tilde = 0.0;
          if (method == Strategy::Opt || method == Strategy::Iboss) {
            // Linear-regression baselines: unpenalized fits.
            lambda_tilde = 0.0;
          } else {
            switch (spec.lambda_policy) {
              case LambdaPolicy::Fixed: lambda_tilde = spec.fixed_lambda; break;
              case LambdaPolicy::SubsampleGcv:
                lambda_tilde =
                    tune_subsample(data, sub, spec.lambda_grid, TuneMethod::Gcv).lambda_star;
                break;
              case LambdaPolicy::SubsampleKfold:
                lambda_tilde = tune_subsample(data, sub, spec.lambda_grid, TuneMethod::KFold,
                                              spec.kfold_k, derive_seed(rec.seed, 1))
                                   .lambda_star;
                break;
            }
          }
          rec.lambda_tilde = lambda_tilde;

          const RidgeFit fit = weighted_ridge_solve(data, sub, lambda_tilde);

          if (beta_target) rec.mse_true = (fit.beta - *beta_target).squaredNorm();
          const double ref_lambda = spec.reference_lambda.value_or(lambda_tilde);
          const Eigen::VectorXd beta_ref = solver.solve(ref_lambda);
          rec.mse_full = (fit.beta - beta_ref).squaredNorm();
          if (test && test->n() > 0) {
            rec.test_error =
                (test->y - test->X * fit.beta).squaredNorm() / static_cast<double>(test->n());
          }
          rec.solve_seconds = solve_clock.seconds();
        } catch (const std::exception& e) {
          rec.note = e.what();
        }
      }

      records[(mi * n_r + ri) * static_cast<std::size_t>(spec.replicates) +
              static_cast<std::size_t>(replicate)] = rec;
    }
  }
}

}  // namespace detail

/// Simulation protocol: per replicate, generate one synthetic dataset,
/// standardize the design, then for every method and subsample size draw,
/// tune lambda on the subsample per policy, fit, and record the squared
/// errors against the true coefficients and against the full-sample fit.
inline ExperimentReport run_simulation(const ExperimentSpec& spec) {
  if (!spec.sim) throw std::invalid_argument("run_simulation needs a simulation source");
  validate_config(*spec.sim);
  detail::validate_spec(spec, spec.sim->n, true);

  ExperimentReport report;
  report.spec = spec;
  report.records.resize(spec.methods.size() * spec.r_grid.size() *
                        static_cast<std::size_t>(spec.replicates));

  parallel_for(spec.replicates, [&](std::int64_t rep) {
    SimConfig cfg = *spec.sim;
    cfg.seed = derive_seed(spec.seed, (1ULL << 40) + static_cast<std::uint64_t>(rep));
    auto [raw, truth] = generate(cfg);
    auto [data, stats] = standardize(raw);
    // Coefficients in the standardized coordinates: scaling column j by
    // 1/s_j scales its coefficient by s_j.
    const Eigen::VectorXd beta_target = stats.column_scales.cwiseProduct(truth.beta_true);
    detail::run_replicate_cells(spec, data, nullptr, &beta_target, static_cast<int>(rep),
                                report.records);
  });

  report.metadata["source"] = "sim:case" + std::to_string(spec.sim->case_id);
  report.metadata["n"] = std::to_string(spec.sim->n);
  report.metadata["p"] = std::to_string(spec.sim->p);
  report.metadata["q"] = std::to_string(spec.sim->q);
  report.metadata["seed"] = std::to_string(spec.seed);
  report.metadata["lambda_policy"] = lambda_policy_name(spec.lambda_policy);
  return report;
}

/// Real-data protocol: ingest CSV once, then per replicate split 70/30 (or
/// per spec), standardize on the training statistics, and evaluate every
/// method by its distance to the full-training-sample fit and its test
/// prediction error.
inline ExperimentReport run_realdata(const ExperimentSpec& spec) {
  if (!spec.csv) throw std::invalid_argument("run_realdata needs a CSV source");
  const Dataset full = load_csv(spec.csv->path, spec.csv->response_column, spec.csv->drop_columns);
  const Index n_train =
      static_cast<Index>(std::llround(spec.train_fraction * static_cast<double>(full.n())));
  detail::validate_spec(spec, n_train, false);

  ExperimentReport report;
  report.spec = spec;
  report.records.resize(spec.methods.size() * spec.r_grid.size() *
                        static_cast<std::size_t>(spec.replicates));

  parallel_for(spec.replicates, [&](std::int64_t rep) {
    const Split split = split_dataset(full, spec.train_fraction,
                                      derive_seed(spec.seed, (2ULL << 40) + static_cast<std::uint64_t>(rep)));
    const Dataset train_raw = subset(full, split.train_indices);
    const Dataset test_raw = subset(full, split.test_indices);
    auto [train, stats] = standardize(train_raw);
    const Dataset test = apply_standardization(test_raw, stats);
    detail::run_replicate_cells(spec, train, &test, nullptr, static_cast<int>(rep),
                                report.records);
  });

  report.metadata["source"] = "csv:" + spec.csv->path;
  report.metadata["n"] = std::to_string(full.n());
  report.metadata["p"] = std::to_string(full.p());
  report.metadata["seed"] = std::to_string(spec.seed);
  report.metadata["train_fraction"] = detail::format_double(spec.train_fraction);
  report.metadata["lambda_policy"] = lambda_policy_name(spec.lambda_policy);
  return report;
}

enum class ReportFormat { Csv, Json };

/// Long-format CSV, one row per finite metric:
/// method,r,replicate,metric,value,seed. log10 rows mirror the log-log plots.
inline void emit_report_csv(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report CSV: " + path);
  out << "method,r,replicate,metric,value,seed\n";
  auto row = [&](const ReplicateRecord& rec, const char* metric, double value) {
    if (!std::isfinite(value)) return;
    out << strategy_name(rec.method) << ',' << rec.r << ',' << rec.replicate << ',' << metric
        << ',' << detail::format_double(value) << ',' << rec.seed << '\n';
  };
  for (const auto& rec : report.records) {
    row(rec, "mse_true", rec.mse_true);
    row(rec, "log10_mse_true", std::log10(rec.mse_true));
    row(rec, "mse_full", rec.mse_full);
    row(rec, "log10_mse_full", std::log10(rec.mse_full));
    row(rec, "test_error", rec.test_error);
    row(rec, "log10_test_error", std::log10(rec.test_error));
    row(rec, "lambda_tilde", rec.lambda_tilde);
    row(rec, "lambda_full_gcv", rec.lambda_full_gcv);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void emit_report_json(const ExperimentReport& report, const std::string& path) {
  nlohmann::json j;
  j["metadata"] = report.metadata;
  j["spec"] = {
      {"methods", [&] {
         std::vector<std::string> names;
         for (const Strategy m : report.spec.methods) names.emplace_back(strategy_name(m));
         return names;
       }()},
      {"r_grid", report.spec.r_grid},
      {"replicates", report.spec.replicates},
      {"lambda_policy", lambda_policy_name(report.spec.lambda_policy)},
      {"seed", report.spec.seed},
      {"grid_min", report.spec.lambda_grid.values.front()},
      {"grid_max", report.spec.lambda_grid.values.back()},
      {"grid_size", report.spec.lambda_grid.values.size()},
  };
  j["records"] = nlohmann::json::array();
  for (const auto& rec : report.records) {
    nlohmann::json r{{"method", strategy_name(rec.method)},
                     {"r", rec.r},
                     {"replicate", rec.replicate},
                     {"seed", rec.seed},
                     {"plan_seconds", rec.plan_seconds},
                     {"solve_seconds", rec.solve_seconds}};
    auto set_if = [&](const char* key, double v) {
      if (std::isfinite(v)) r[key] = v;
    };
    set_if("lambda_tilde", rec.lambda_tilde);
    set_if("lambda_full_gcv", rec.lambda_full_gcv);
    set_if("mse_true", rec.mse_true);
    set_if("mse_full", rec.mse_full);
    set_if("test_error", rec.test_error);
    if (!rec.note.empty()) r["note"] = rec.note;
    j["records"].push_back(std::move(r));
  }
  j["aggregates"] = nlohmann::json::array();
  for (const auto& cell : aggregate(report.records)) {
    nlohmann::json c{{"method", strategy_name(cell.method)}, {"r", cell.r}, {"count", cell.count}};
    auto set_if = [&](const char* key, double v) {
      if (std::isfinite(v)) c[key] = v;
    };
    set_if("mean_mse_true", cell.mean_mse_true);
    set_if("median_mse_true", cell.median_mse_true);
    set_if("log10_mean_mse_true", std::log10(cell.mean_mse_true));
    set_if("mean_mse_full", cell.mean_mse_full);
    set_if("median_mse_full", cell.median_mse_full);
    set_if("mean_test_error", cell.mean_test_error);
    set_if("median_test_error", cell.median_test_error);
    set_if("median_lambda_tilde", cell.median_lambda_tilde);
    set_if("median_lambda_gap", cell.median_lambda_gap);
    j["aggregates"].push_back(std::move(c));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report JSON: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void emit_report(const ExperimentReport& report, ReportFormat format,
                        const std::string& path) {
  if (format == ReportFormat::Csv) {
    emit_report_csv(report, path);
  } else {
    emit_report_json(report, path);
  }
}

/// Reads a long-format report CSV back into records (log10 rows are derived
/// data and are skipped). Aggregates recomputed from the result match the
/// emitting report's aggregates exactly.
inline std::vector<ReplicateRecord> parse_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty report CSV: " + path);
  if (detail::trim(line) != "method,r,replicate,metric,value,seed") {
    throw std::runtime_error("unexpected report CSV header: " + line);
  }

  std::vector<ReplicateRecord> records;
  auto find_record = [&](Strategy method, Index r, int replicate,
                         std::uint64_t seed) -> ReplicateRecord& {
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
      if (it->method == method && it->r == r && it->replicate == replicate) return *it;
    }
    ReplicateRecord rec;
    rec.method = method;
    rec.r = r;
    rec.replicate = replicate;
    rec.seed = seed;
    records.push_back(std::move(rec));
    return records.back();
  };

  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 6) throw std::runtime_error("malformed report CSV row: " + line);
    const auto method = strategy_from_name(cells[0]);
    if (!method) throw std::runtime_error("unknown method in report CSV: " + cells[0]);
    const Index r = std::stoll(cells[1]);
    const int replicate = std::stoi(cells[2]);
    const std::string& metric = cells[3];
    double value = 0.0;
    std::from_chars(cells[4].data(), cells[4].data() + cells[4].size(), value);
    const std::uint64_t seed = std::stoull(cells[5]);

    ReplicateRecord& rec = find_record(*method, r, replicate, seed);
    if (metric == "mse_true") rec.mse_true = value;
    else if (metric == "mse_full") rec.mse_full = value;
    else if (metric == "test_error") rec.test_error = value;
    else if (metric == "lambda_tilde") rec.lambda_tilde = value;
    else if (metric == "lambda_full_gcv") rec.lambda_full_gcv = value;
    // log10_* rows are recomputable; ignore.
  }
  return records;
}

}  // namespace ridgesub
