#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pbqn/rng.hpp"
#include "pbqn/vector_ops.hpp"

namespace pbqn {

/// One sparse feature vector: parallel index/value arrays with strictly
/// increasing indices.
struct SparseRow {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
};

inline double sparse_dot(const SparseRow& row, const Vector& x) {
  double s = 0.0;
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    s += row.values[k] * x[row.indices[k]];
  }
  return s;
}

/// x += c * row
inline void sparse_axpy(double c, const SparseRow& row, Vector& x) {
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    x[row.indices[k]] += c * row.values[k];
  }
}

inline double sparse_norm_sq(const SparseRow& row) {
  double s = 0.0;
  for (double v : row.values) s += v * v;
  return s;
}

/// Binary classification dataset with labels normalized to {-1, +1}.
struct SparseDataset {
  std::string name;
  std::vector<SparseRow> rows;
  std::vector<int> labels;  // each -1 or +1
  std::size_t dim = 0;      // max feature index + 1

  std::size_t size() const { return rows.size(); }
};

namespace detail {

inline double parse_double_token(std::string_view tok, std::size_t line_no,
                                 const char* what) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                             ": bad " + what + " '" + std::string(tok) + "'");
  }
  return out;
}

/// Map raw labels onto {-1, +1}: the smaller of the two class values becomes
/// -1. Handles the {0,1}, {-1,+1} and {1,2} conventions uniformly.
inline void normalize_labels(std::vector<double>& raw, std::vector<int>& out) {
  std::set<double> distinct(raw.begin(), raw.end());
  if (distinct.size() > 2) {
    throw std::runtime_error("dataset has more than two label values");
  }
  if (distinct.size() == 1) {
    const double v = *distinct.begin();
    if (v != -1.0 && v != 1.0) {
      throw std::runtime_error("single-class dataset with non ±1 label");
    }
    out.assign(raw.size(), static_cast<int>(v));
    return;
  }
  const double low = *distinct.begin();
  out.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = raw[i] == low ? -1 : +1;
  }
}

}  // namespace detail

/// Parse a sparse classification text stream. Grammar per line:
///   <label> <idx>:<val> <idx>:<val> ...
/// with 1-based, strictly increasing feature indices. Labels are normalized
/// to {-1, +1}. Parsing is streaming: memory stays proportional to one line
/// plus the output.
inline SparseDataset parse_sparse_stream(std::istream& in, std::string name) {
  SparseDataset ds;
  ds.name = std::move(name);
  std::vector<double> raw_labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    // strip comments and trailing whitespace
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) {
      sv = sv.substr(0, hash);
    }
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r')) {
      sv.remove_suffix(1);
    }
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) {
      sv.remove_prefix(1);
    }
    if (sv.empty()) continue;

    const auto next_token = [&sv]() {
      const auto end = sv.find_first_of(" \t");
      std::string_view tok = sv.substr(0, end);
      sv.remove_prefix(end == std::string_view::npos ? sv.size() : end);
      while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) {
        sv.remove_prefix(1);
      }
      return tok;
    };

    std::string_view label_tok = next_token();
    if (!label_tok.empty() && label_tok.front() == '+') label_tok.remove_prefix(1);
    raw_labels.push_back(detail::parse_double_token(label_tok, line_no, "label"));

    SparseRow row;
    std::int64_t prev_index = -1;
    while (!sv.empty()) {
      const std::string_view tok = next_token();
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": expected idx:val, got '" + std::string(tok) + "'");
      }
      const std::string_view idx_tok = tok.substr(0, colon);
      std::uint32_t idx1 = 0;
      const auto [ptr, ec] =
          std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx1);
      if (ec != std::errc{} || ptr != idx_tok.data() + idx_tok.size() || idx1 == 0) {
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": bad feature index '" + std::string(idx_tok) + "'");
      }
      const std::int64_t idx0 = static_cast<std::int64_t>(idx1) - 1;  // to 0-based
      if (idx0 <= prev_index) {
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": feature indices not strictly increasing");
      }
      prev_index = idx0;
      row.indices.push_back(static_cast<std::uint32_t>(idx0));
      row.values.push_back(
          detail::parse_double_token(tok.substr(colon + 1), line_no, "feature value"));
    }
    if (!row.indices.empty()) {
      ds.dim = std::max(ds.dim, static_cast<std::size_t>(row.indices.back()) + 1);
    }
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) {
    throw std::runtime_error("dataset '" + ds.name + "' is empty");
  }
  detail::normalize_labels(raw_labels, ds.labels);
  return ds;
}

inline SparseDataset parse_sparse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  auto slash = path.find_last_of('/');
  return parse_sparse_stream(in, slash == std::string::npos ? path : path.substr(slash + 1));
}

/// Inverse of the parser (1-based indices, %.17g values), used for dataset
/// export and round-trip checks.
inline void write_sparse_stream(std::ostream& out, const SparseDataset& ds) {
  char buf[64];
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    out << (ds.labels[i] > 0 ? "+1" : "-1");
    const SparseRow& row = ds.rows[i];
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", row.values[k]);
      out << ' ' << (row.indices[k] + 1) << ':' << buf;
    }
    out << '\n';
  }
}

inline void write_sparse_file(const std::string& path, const SparseDataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  write_sparse_stream(out, ds);
}

struct SplitSpec {
  double train_fraction = 0.9;
  std::uint64_t seed = 0;
};

/// Deterministic shuffled partition: the first ceil(train_fraction * n)
/// shuffled rows form the training set, the remainder the test set.
inline std::pair<SparseDataset, SparseDataset> split(const SparseDataset& ds,
                                                     const SplitSpec& spec) {
  if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0) {
    throw std::invalid_argument("split: train_fraction must be in (0,1)");
  }
  const std::size_t n = ds.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  deterministic_shuffle(order, rng);

  const std::size_t n_train =
      static_cast<std::size_t>(std::ceil(spec.train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw std::invalid_argument("split: fraction produces an empty side");
  }
  SparseDataset train, test;
  train.name = ds.name + ".train";
  test.name = ds.name + ".test";
  train.dim = test.dim = ds.dim;
  for (std::size_t i = 0; i < n; ++i) {
    SparseDataset& side = i < n_train ? train : test;
    side.rows.push_back(ds.rows[order[i]]);
    side.labels.push_back(ds.labels[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

/// Published shape of a known benchmark dataset, used to sanity-check local
/// copies. Advisory: mismatches produce warnings, not failures.
struct DatasetInfo {
  std::string name;
  std::size_t train_points;
  std::size_t test_points;
  std::size_t features;
  bool large = false;  // excluded from default suites
};

inline const std::vector<DatasetInfo>& registry() {
  static const std::vector<DatasetInfo> entries = {
      {"gisette", 6000, 1000, 5000, false},
      {"mushrooms", 7311, 813, 112, false},
      {"sido", 11410, 1268, 4932, false},
      {"ijcnn", 35000, 91701, 22, false},
      {"spam", 82970, 9219, 823470, true},
      {"alpha", 450000, 50000, 500, true},
      {"covertype", 522910, 58102, 54, true},
      {"url", 2156517, 239613, 3231961, true},
  };
  return entries;
}

inline const DatasetInfo* registry_find(std::string_view name) {
  for (const auto& info : registry()) {
    if (name.find(info.name) != std::string_view::npos) return &info;
  }
  return nullptr;
}

/// Compare a parsed dataset against its registry entry, if any.
inline std::vector<std::string> registry_warnings(const SparseDataset& ds) {
  std::vector<std::string> warnings;
  const DatasetInfo* info = registry_find(ds.name);
  if (info == nullptr) return warnings;
  const std::size_t expected_points = info->train_points + info->test_points;
  if (ds.size() != expected_points && ds.size() != info->train_points) {
    warnings.push_back("row count " + std::to_string(ds.size()) +
                       " differs from registry (" + std::to_string(expected_points) +
                       " total / " + std::to_string(info->train_points) + " train)");
  }
  if (ds.dim > info->features) {
    warnings.push_back("feature count " + std::to_string(ds.dim) +
                       " exceeds registry value " + std::to_string(info->features));
  }
  return warnings;
}

}  // namespace pbqn
