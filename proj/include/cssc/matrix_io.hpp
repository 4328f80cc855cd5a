#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cssc/constraints.hpp"
#include "cssc/data_matrix.hpp"
#include "cssc/labels.hpp"

namespace cssc {

enum class Orientation { rows_are_features, rows_are_samples };

inline Orientation parse_orientation(std::string_view s) {
  if (s == "rows-are-features") return Orientation::rows_are_features;
  if (s == "rows-are-samples") return Orientation::rows_are_samples;
  throw std::invalid_argument("unknown orientation '" + std::string(s) +
                              "' (expected rows-are-features or rows-are-samples)");
}

namespace detail {

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(std::move(line));
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  for (auto& tok : out) {
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    tok = b == std::string::npos ? std::string() : tok.substr(b, e - b + 1);
  }
  return out;
}

inline bool parse_double(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !tok.empty();
}

}  // namespace detail

/// Reads a CSV/TSV numeric table (delimiter auto-detected, optional single
/// header row and/or leading name column) and returns it in feature-by-sample
/// orientation.
inline DataMatrix load_matrix(const std::filesystem::path& path, Orientation orientation) {
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw std::runtime_error("'" + path.string() + "' is empty");
  const char delim = lines.front().find('\t') != std::string::npos ? '\t' : ',';

  std::vector<std::vector<std::string>> rows;
  rows.reserve(lines.size());
  for (const auto& line : lines) rows.push_back(detail::split(line, delim));

  auto is_numeric_row = [](const std::vector<std::string>& row, std::size_t from) {
    double v;
    for (std::size_t c = from; c < row.size(); ++c)
      if (!detail::parse_double(row[c], v)) return false;
    return true;
  };

  // A non-numeric first row is a header; a non-numeric first cell in any data
  // row means the table carries a leading name column.
  const bool header_row = rows.size() > 1 && !is_numeric_row(rows[0], 0);
  const std::size_t first_data = header_row ? 1 : 0;
  bool name_col = false;
  double v;
  for (std::size_t r = first_data; r < rows.size(); ++r)
    if (!rows[r].empty() && !detail::parse_double(rows[r][0], v)) {
      name_col = true;
      break;
    }
  const std::size_t first_col = name_col ? 1 : 0;

  const std::size_t n_rows = rows.size() - first_data;
  if (n_rows == 0) throw std::runtime_error("'" + path.string() + "' has no data rows");
  const std::size_t width = rows[first_data].size();
  if (width <= first_col) throw std::runtime_error("'" + path.string() + "' has no data columns");
  const std::size_t n_cols = width - first_col;

  Eigen::MatrixXd m(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  std::vector<std::string> row_names, col_names;
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != width)
      throw std::runtime_error("'" + path.string() + "': ragged row " + std::to_string(r + 1) +
                               " has " + std::to_string(row.size()) + " cells, expected " +
                               std::to_string(width));
    if (name_col) row_names.push_back(row[0]);
    for (std::size_t c = first_col; c < row.size(); ++c) {
      double value;
      if (!detail::parse_double(row[c], value))
        throw std::runtime_error("'" + path.string() + "': cell at row " + std::to_string(r + 1) +
                                 ", column " + std::to_string(c + 1) + " is not numeric: '" +
                                 row[c] + "'");
      if (!std::isfinite(value))
        throw std::runtime_error("'" + path.string() + "': non-finite value at row " +
                                 std::to_string(r + 1) + ", column " + std::to_string(c + 1));
      m(static_cast<Eigen::Index>(r - first_data), static_cast<Eigen::Index>(c - first_col)) = value;
    }
  }
  if (header_row) {
    const auto& h = rows[0];
    // Header may or may not carry a corner cell above the name column.
    const std::size_t skip = h.size() == width ? first_col : (h.size() == n_cols ? 0 : first_col);
    for (std::size_t c = skip; c < h.size(); ++c) col_names.push_back(h[c]);
    if (col_names.size() != n_cols) col_names.clear();
  }

  DataMatrix out;
  if (orientation == Orientation::rows_are_features) {
    out.values = std::move(m);
    out.feature_names = std::move(row_names);
    out.sample_names = std::move(col_names);
  } else {
    out.values = m.transpose();
    out.feature_names = std::move(col_names);
    out.sample_names = std::move(row_names);
  }
  out.validate();
  return out;
}

inline void save_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

/// Labels file: one 1-based integer per line.
inline Labels load_labels(const std::filesystem::path& path) {
  const auto lines = detail::read_lines(path);
  std::vector<int> a;
  a.reserve(lines.size());
  int n = 0;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    int value;
    const auto& tok = lines[r];
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw std::runtime_error("'" + path.string() + "': line " + std::to_string(r + 1) +
                               " is not an integer label: '" + tok + "'");
    a.push_back(value);
    n = std::max(n, value);
  }
  if (a.empty()) throw std::runtime_error("'" + path.string() + "' contains no labels");
  return Labels{std::move(a), n};
}

inline void save_labels(const Labels& labels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (int a : labels.assignments) out << a << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

/// Constraints file: one `i j ML` or `i j CL` per line, 0-based indices.
inline ConstraintSet load_constraints(const std::filesystem::path& path, int population) {
  const auto lines = detail::read_lines(path);
  std::vector<Constraint> pairs;
  pairs.reserve(lines.size());
  for (std::size_t r = 0; r < lines.size(); ++r) {
    std::istringstream ss(lines[r]);
    int i, j;
    std::string kind;
    if (!(ss >> i >> j >> kind))
      throw std::runtime_error("'" + path.string() + "': line " + std::to_string(r + 1) +
                               " is not of the form 'i j ML|CL': '" + lines[r] + "'");
    ConstraintKind k;
    if (kind == "ML" || kind == "ml")
      k = ConstraintKind::must_link;
    else if (kind == "CL" || kind == "cl")
      k = ConstraintKind::cannot_link;
    else
      throw std::runtime_error("'" + path.string() + "': line " + std::to_string(r + 1) +
                               " has unknown constraint kind '" + kind + "'");
    pairs.push_back({i, j, k});
  }
  return ConstraintSet(std::move(pairs), population);
}

inline void save_constraints(const ConstraintSet& cs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (const Constraint& c : cs.pairs())
    out << c.i << ' ' << c.j << ' ' << (c.kind == ConstraintKind::must_link ? "ML" : "CL") << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace cssc
