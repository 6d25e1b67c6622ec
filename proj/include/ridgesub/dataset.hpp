#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ridgesub/rng.hpp"

namespace ridgesub {

using Index = Eigen::Index;

/// Design matrix (one observation per row) and response. Immutable by
/// convention once built; fits and samplers only ever read it.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
};

struct StandardizationStats {
  Eigen::VectorXd column_means;
  Eigen::VectorXd column_scales;  // sample standard deviations, n-1 denominator
};

struct Split {
  std::vector<Index> train_indices;
  std::vector<Index> test_indices;
};

inline void validate_dataset(const Dataset& d) {
  if (d.n() < 1 || d.p() < 1) {
    throw std::invalid_argument("dataset must have at least one row and one column");
  }
  if (d.y.size() != d.n()) {
    throw std::invalid_argument("response length does not match row count");
  }
  if (!d.X.allFinite() || !d.y.allFinite()) {
    throw std::invalid_argument("dataset contains non-finite entries");
  }
}

inline Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y) {
  Dataset d{std::move(X), std::move(y)};
  validate_dataset(d);
  return d;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

/// Locale-independent parse; '.' is the decimal separator no matter the
/// process locale.
inline double parse_numeric_cell(const std::string& cell, Index row, const std::string& column) {
  const char* begin = cell.c_str();
  const char* end = begin + cell.size();
  if (begin != end && *begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc{} || ptr != end) {
    throw std::runtime_error("non-numeric cell '" + cell + "' at data row " +
                             std::to_string(row + 1) + ", column '" + column + "'");
  }
  if (!std::isfinite(value)) {
    throw std::runtime_error("non-finite cell at data row " + std::to_string(row + 1) +
                             ", column '" + column + "'");
  }
  return value;
}

/// Shortest decimal form that parses back to the same double,
/// locale-independent.
inline std::string format_double(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

}  // namespace detail

/// Reads a numeric CSV with a mandatory header row. The response column may
/// be named or given as a 0-based column index; dropped columns are removed
/// before the design matrix is assembled. Constant columns are rejected here
/// because standardization cannot scale them.
inline Dataset load_csv(const std::string& path, const std::string& response_column,
                        const std::vector<std::string>& drop_columns = {},
                        std::vector<std::string>* feature_names_out = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);
  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.empty()) throw std::runtime_error("CSV header row is empty: " + path);

  auto column_index = [&](const std::string& name) -> Index {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it != header.end()) return static_cast<Index>(it - header.begin());
    return -1;
  };

  Index response_idx = column_index(response_column);
  if (response_idx < 0 && !response_column.empty() &&
      std::all_of(response_column.begin(), response_column.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    const Index idx = std::stoll(response_column);
    if (idx < static_cast<Index>(header.size())) response_idx = idx;
  }
  if (response_idx < 0) {
    throw std::runtime_error("response column '" + response_column + "' not found in " + path);
  }

  std::vector<bool> dropped(header.size(), false);
  for (const auto& name : drop_columns) {
    const Index idx = column_index(name);
    if (idx < 0) throw std::runtime_error("drop column '" + name + "' not found in " + path);
    dropped[static_cast<std::size_t>(idx)] = true;
  }
  if (dropped[static_cast<std::size_t>(response_idx)]) {
    throw std::runtime_error("response column '" + response_column + "' cannot be dropped");
  }

  std::vector<Index> feature_cols;
  for (Index j = 0; j < static_cast<Index>(header.size()); ++j) {
    if (j != response_idx && !dropped[static_cast<std::size_t>(j)]) feature_cols.push_back(j);
  }
  if (feature_cols.empty()) throw std::runtime_error("no feature columns left in " + path);

  std::vector<std::vector<double>> rows;
  Index row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("data row " + std::to_string(row + 1) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    }
    std::vector<double> values(header.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      values[j] = detail::parse_numeric_cell(cells[j], row, header[j]);
    }
    rows.push_back(std::move(values));
    ++row;
  }
  if (rows.empty()) throw std::runtime_error("CSV has no data rows: " + path);

  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(feature_cols.size());
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(response_idx)];
    for (Index j = 0; j < p; ++j) {
      X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(feature_cols[static_cast<std::size_t>(j)])];
    }
  }

  for (Index j = 0; j < p; ++j) {
    if (n > 1 && X.col(j).maxCoeff() == X.col(j).minCoeff()) {
      throw std::runtime_error("constant column '" +
                               header[static_cast<std::size_t>(feature_cols[static_cast<std::size_t>(j)])] +
                               "' in " + path);
    }
  }

  if (feature_names_out) {
    feature_names_out->clear();
    for (const Index j : feature_cols) feature_names_out->push_back(header[static_cast<std::size_t>(j)]);
  }
  return make_dataset(std::move(X), std::move(y));
}

/// Writes a dataset as numeric CSV. Values are printed with 17 significant
/// digits so load_csv reads back the exact same doubles.
inline void write_csv(const Dataset& d, const std::string& path,
                      const std::vector<std::string>& feature_names = {},
                      const std::string& response_name = "y") {
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != d.p()) {
    throw std::invalid_argument("feature name count does not match column count");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV file: " + path);
  for (Index j = 0; j < d.p(); ++j) {
    out << (feature_names.empty() ? "x" + std::to_string(j + 1) : feature_names[static_cast<std::size_t>(j)])
        << ',';
  }
  out << response_name << '\n';
  for (Index i = 0; i < d.n(); ++i) {
    for (Index j = 0; j < d.p(); ++j) out << detail::format_double(d.X(i, j)) << ',';
    out << detail::format_double(d.y(i)) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Centers and scales every column to mean 0, sample sd 1. The response is
/// left untouched.
inline std::pair<Dataset, StandardizationStats> standardize(const Dataset& d) {
  validate_dataset(d);
  if (d.n() < 2) throw std::invalid_argument("standardize needs at least two rows");
  StandardizationStats stats;
  stats.column_means = d.X.colwise().mean();
  Eigen::MatrixXd centered = d.X.rowwise() - stats.column_means.transpose();
  stats.column_scales =
      (centered.colwise().squaredNorm() / static_cast<double>(d.n() - 1)).cwiseSqrt();
  for (Index j = 0; j < d.p(); ++j) {
    if (!(stats.column_scales(j) > 0.0) || !std::isfinite(stats.column_scales(j))) {
      throw std::runtime_error("constant column at index " + std::to_string(j + 1));
    }
  }
  centered.array().rowwise() /= stats.column_scales.transpose().array();
  return {Dataset{std::move(centered), d.y}, std::move(stats)};
}

/// Applies previously computed training statistics, e.g. to a test split.
inline Dataset apply_standardization(const Dataset& d, const StandardizationStats& stats) {
  if (stats.column_means.size() != d.p() || stats.column_scales.size() != d.p()) {
    throw std::invalid_argument("standardization stats do not match column count");
  }
  Eigen::MatrixXd X = d.X.rowwise() - stats.column_means.transpose();
  X.array().rowwise() /= stats.column_scales.transpose().array();
  return Dataset{std::move(X), d.y};
}

/// Seeded random partition into train and test. |train| = round(fraction * n).
inline Split split_dataset(const Dataset& d, double train_fraction, std::uint64_t seed) {
  validate_dataset(d);
  const Index n = d.n();
  if (n < 2) throw std::invalid_argument("split needs at least two rows");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  const Index n_train = static_cast<Index>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n) {
    throw std::invalid_argument("degenerate train fraction: empty partition");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  for (Index i = n - 1; i > 0; --i) {  // Fisher-Yates
    const Index j = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  Split split;
  split.train_indices.assign(order.begin(), order.begin() + n_train);
  split.test_indices.assign(order.begin() + n_train, order.end());
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  return split;
}

/// Materializes the rows named by `indices` (repeats allowed).
inline Dataset subset(const Dataset& d, const std::vector<Index>& indices) {
  Eigen::MatrixXd X(static_cast<Index>(indices.size()), d.p());
  Eigen::VectorXd y(static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index i = indices[k];
    if (i < 0 || i >= d.n()) throw std::out_of_range("row index out of range");
    X.row(static_cast<Index>(k)) = d.X.row(i);
    y(static_cast<Index>(k)) = d.y(i);
  }
  return Dataset{std::move(X), std::move(y)};
}

}  // namespace ridgesub
