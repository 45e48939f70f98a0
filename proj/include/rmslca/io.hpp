#pragma once

// CSV ingestion with block assignment, CSV output, and the block-whitening preprocessor.

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rmslca/blocks.hpp"
#include "rmslca/elliptical.hpp"
#include "rmslca/errors.hpp"
#include "rmslca/mcd.hpp"
#include "rmslca/mslca.hpp"

namespace rmslca {

struct Dataset {
  Matrix rows;                            // n x q, columns block-contiguous
  std::vector<std::string> column_names;  // in stored order
  std::vector<int> block_assignment;      // 0-based block of each stored column
  BlockStructure structure;
};

namespace detail {

// Splits one CSV record; handles quoted fields with doubled quotes.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t row) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", row, out.size() + 1);
  out.push_back(std::move(cur));
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string s = trim(raw);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw NonNumericCell("non-numeric or missing cell '" + s + "' at row " + std::to_string(row) +
                             ", column " + std::to_string(col),
                         row, col);
  }
  return v;
}

}  // namespace detail

/// Parses "1,1,2,2" into 1-based block labels.
inline std::vector<int> parse_block_spec(const std::string& spec) {
  std::vector<int> labels;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = detail::trim(tok);
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || v < 1) {
      throw InvalidArgument("block spec: '" + tok + "' is not a positive integer label");
    }
    labels.push_back(v);
  }
  if (labels.empty()) throw InvalidArgument("block spec is empty");
  return labels;
}

/// Parses "2,3,2" into block dimensions.
inline BlockStructure parse_dims(const std::string& spec) {
  return BlockStructure(parse_block_spec(spec));
}

/// Builds a dataset from an n x q matrix whose column j carries block label labels[j]
/// (1-based). Columns are reordered stably so blocks are contiguous.
inline Dataset make_dataset(const Matrix& raw, std::vector<std::string> names, const std::vector<int>& labels) {
  const int q = static_cast<int>(raw.cols());
  if (static_cast<int>(labels.size()) != q) {
    throw MissingColumn("block spec names " + std::to_string(labels.size()) + " columns, data has " +
                        std::to_string(q));
  }
  if (raw.rows() < 2) throw InvalidArgument("dataset needs at least two rows");
  std::map<int, int> count;
  for (int l : labels) ++count[l];
  const int K = static_cast<int>(count.size());
  if (count.rbegin()->first != K) {
    throw InvalidArgument("block labels must be exactly 1..K with no gaps");
  }
  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return labels[a] < labels[b]; });
  Dataset d;
  d.rows.resize(raw.rows(), q);
  std::vector<int> dims;
  for (auto& [label, c] : count) dims.push_back(c);
  d.structure = BlockStructure(dims);
  for (int j = 0; j < q; ++j) {
    d.rows.col(j) = raw.col(order[j]);
    d.column_names.push_back(names.empty() ? "x" + std::to_string(order[j] + 1) : names[order[j]]);
    d.block_assignment.push_back(labels[order[j]] - 1);
  }
  return d;
}

/// Header row required; every cell must parse as a finite number.
inline Dataset load_csv(const std::string& path, const std::vector<int>& labels) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file '" + path + "'", 1, 0);
  const auto header = detail::split_csv_line(line, 1);
  std::vector<std::string> names;
  for (const auto& h : header) names.push_back(detail::trim(h));
  const std::size_t q = names.size();
  std::vector<std::vector<double>> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line, row);
    if (cells.size() != q) {
      throw MissingColumn("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                              " cells, header has " + std::to_string(q),
                          row, std::min(cells.size(), q) + 1);
    }
    std::vector<double> r(q);
    for (std::size_t j = 0; j < q; ++j) r[j] = detail::parse_cell(cells[j], row, j + 1);
    values.push_back(std::move(r));
  }
  Matrix m(values.size(), q);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < q; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
  }
  return make_dataset(m, std::move(names), labels);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes a header and rows with 17 significant digits, which round-trips doubles exactly.
inline void write_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& names) {
  if (static_cast<Eigen::Index>(names.size()) != m.cols()) {
    throw InvalidArgument("write_csv: header size does not match column count");
  }
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

inline void write_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& names) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  write_csv(out, m, names);
}

/// Block-diagonal map x -> W (x - center) with W_k = (estimated V_k)^{-1/2}.
struct WhitenTransform {
  Vector center;
  Matrix w;       // block-diagonal, symmetric
  Matrix scatter; // estimate of V on the original scale
  Estimator estimator = Estimator::classical;

  /// Canonical direction fitted on whitened data, expressed on the original scale.
  Vector map_direction(const Vector& alpha_white) const { return w * alpha_white; }

  /// Scatter estimate on the whitened scale; diagonal blocks are the identity.
  Matrix whitened_scatter(const BlockStructure& bs) const {
    Matrix s = symmetrize(w * scatter * w);
    for (int k = 0; k < bs.num_blocks(); ++k) {
      s.block(bs.offset(k), bs.offset(k), bs.dim(k), bs.dim(k)).setIdentity();
    }
    return s;
  }
};

struct WhitenResult {
  Dataset data;
  WhitenTransform transform;
};

/// Centers at the estimator's location and multiplies each block by the inverse square root
/// of its estimated within-block scatter (sample covariance, or consistency-corrected MCD).
inline WhitenResult whiten(const Dataset& ds, Estimator estimator, double gamma = 0.75,
                           const McdOptions& mcd = {}) {
  const auto& bs = ds.structure;
  WhitenTransform t;
  t.estimator = estimator;
  if (estimator == Estimator::classical) {
    t.center = ds.rows.colwise().mean().transpose();
    t.scatter = sample_covariance(ds.rows);
  } else {
    const McdFit fit = fast_mcd(ds.rows, subset_size(static_cast<int>(ds.rows.rows()), gamma), mcd);
    const auto c = compute_constants(gamma, EllipticalModel::gaussian(bs.q()));
    t.center = fit.location;
    t.scatter = consistency_correct(fit, c);
  }
  t.w = inv_sqrt_psd(f_map(t.scatter, bs));
  WhitenResult out;
  out.data = ds;
  out.data.rows = (ds.rows.rowwise() - t.center.transpose()) * t.w;
  out.transform = std::move(t);
  return out;
}

}  // namespace rmslca
