#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cssc/admm.hpp"
#include "cssc/matrix_io.hpp"
#include "cssc/metrics.hpp"
#include "cssc/pipelines.hpp"

namespace cssc {

struct GridSpec {
  std::vector<double> lambda0_values;
  std::vector<double> alpha_values;
  Method method = Method::cssc;
  std::vector<std::uint64_t> seeds;
  PipelineOptions base;  // per-cell runs override solver.lambda and seed
  int T_max = 10;

  void validate() const {
    if (lambda0_values.empty() || alpha_values.empty())
      throw std::invalid_argument("GridSpec: value lists must be nonempty");
    if (seeds.empty()) throw std::invalid_argument("GridSpec: seed list must be nonempty");
    switch (method) {
      case Method::cssc:
      case Method::cssc_plus:
      case Method::cs3c:
      case Method::cs3c_plus:
        break;
      default:
        throw std::invalid_argument(
            "GridSpec: grid search scores cells by the restricted pairwise index, which needs a "
            "constraint-consuming method (cssc, cssc_plus, cs3c, cs3c_plus)");
    }
    for (double l : lambda0_values)
      if (!(l > 0.0)) throw std::invalid_argument("GridSpec: lambda0 values must be > 0");
    for (double a : alpha_values)
      if (a < 0.0) throw std::invalid_argument("GridSpec: alpha values must be >= 0");
  }
};

struct GridCell {
  double lambda0 = 0.0;
  double alpha = 0.0;
  std::vector<double> rie;  // per seed, in spec order
  std::vector<double> err;  // per seed; NaN without ground truth
  double mean_rie = std::numeric_limits<double>::quiet_NaN();
  double mean_err = std::numeric_limits<double>::quiet_NaN();
  std::string failure;  // nonempty excludes the cell from the argmax

  bool ok() const { return failure.empty(); }
};

struct GridSurface {
  Method method = Method::cssc;
  std::vector<std::uint64_t> seeds;
  std::vector<GridCell> cells;  // lambda0-major, alpha-minor
};

struct GridResult {
  double best_lambda0 = 0.0;
  double best_alpha = 0.0;
  GridSurface surface;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

/// Evaluates the chosen pipeline on the full (lambda0, alpha) grid, scoring
/// each cell by the restricted pairwise index averaged over the shared seed
/// list. Failed cells keep their message and never win. Ties prefer smaller
/// alpha, then smaller lambda0.
inline GridResult grid_search(const DataMatrix& X, const ConstraintSet& cs, const GridSpec& spec,
                              const Labels* truth = nullptr) {
  spec.validate();
  if (cs.empty())
    throw std::invalid_argument("grid_search: constraint set is empty; cells cannot be scored");

  GridResult result;
  result.surface.method = spec.method;
  result.surface.seeds = spec.seeds;

  for (double lambda0 : spec.lambda0_values) {
    for (double alpha : spec.alpha_values) {
      GridCell cell;
      cell.lambda0 = lambda0;
      cell.alpha = alpha;
      try {
        PipelineOptions opts = spec.base;
        opts.solver.lambda = lambda_from_lambda0(X, lambda0);
        for (std::uint64_t s : spec.seeds) {
          opts.seed = s;
          const ClusteringResult run = run_method(spec.method, X, cs, opts, alpha, spec.T_max);
          cell.rie.push_back(rand_index_estimator(run.labels, cs));
          cell.err.push_back(truth != nullptr ? clustering_error(run.labels, *truth)
                                              : std::numeric_limits<double>::quiet_NaN());
        }
        cell.mean_rie = detail::mean_of(cell.rie);
        cell.mean_err = detail::mean_of(cell.err);
      } catch (const std::exception& e) {
        cell.failure = e.what();
        cell.rie.assign(spec.seeds.size(), std::numeric_limits<double>::quiet_NaN());
        cell.err.assign(spec.seeds.size(), std::numeric_limits<double>::quiet_NaN());
      }
      result.surface.cells.push_back(std::move(cell));
    }
  }

  const GridCell* best = nullptr;
  for (const GridCell& cell : result.surface.cells) {
    if (!cell.ok()) continue;
    if (best == nullptr || cell.mean_rie > best->mean_rie ||
        (cell.mean_rie == best->mean_rie &&
         (cell.alpha < best->alpha ||
          (cell.alpha == best->alpha && cell.lambda0 < best->lambda0))))
      best = &cell;
  }
  if (best == nullptr)
    throw std::runtime_error("grid_search: every grid cell failed; first failure: " +
                             result.surface.cells.front().failure);
  result.best_lambda0 = best->lambda0;
  result.best_alpha = best->alpha;
  return result;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

inline double parse_csv_double(const std::string& tok, std::size_t row, std::size_t col) {
  double v = 0.0;
  if (!parse_double(tok, v))
    throw std::runtime_error("parse_surface: cannot parse '" + tok + "' at row " +
                             std::to_string(row) + ", field " + std::to_string(col));
  return v;
}

}  // namespace detail

/// Long-format CSV: method,lambda0,alpha,seed,rie,err — one row per
/// (cell, seed), failed cells included with nan scores.
inline void export_surface(const GridSurface& surface, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("export_surface: cannot open '" + path + "' for writing");
  out << "method,lambda0,alpha,seed,rie,err\n";
  for (const GridCell& cell : surface.cells) {
    for (std::size_t s = 0; s < surface.seeds.size(); ++s) {
      out << method_name(surface.method) << ',' << detail::format_double(cell.lambda0) << ','
          << detail::format_double(cell.alpha) << ',' << surface.seeds[s] << ','
          << detail::format_double(cell.rie[s]) << ',' << detail::format_double(cell.err[s])
          << '\n';
    }
  }
  if (!out) throw std::runtime_error("export_surface: write to '" + path + "' failed");
}

/// Rebuilds a surface from the long-format CSV; cell means are recomputed.
inline GridSurface parse_surface(const std::string& path) {
  const std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty() || lines[0] != "method,lambda0,alpha,seed,rie,err")
    throw std::runtime_error("parse_surface: '" + path + "' lacks the expected header");

  GridSurface surface;
  std::map<std::pair<double, double>, std::size_t> index;  // (lambda0, alpha) -> cell
  bool have_method = false;
  std::vector<std::uint64_t> seen_seeds;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const std::vector<std::string> f = detail::split(lines[r], ',');
    if (f.size() != 6)
      throw std::runtime_error("parse_surface: row " + std::to_string(r + 1) + " has " +
                               std::to_string(f.size()) + " fields, expected 6");
    const Method m = parse_method(f[0]);
    if (!have_method) {
      surface.method = m;
      have_method = true;
    } else if (m != surface.method) {
      throw std::runtime_error("parse_surface: mixed methods in one surface file");
    }
    const double lambda0 = detail::parse_csv_double(f[1], r + 1, 2);
    const double alpha = detail::parse_csv_double(f[2], r + 1, 3);
    std::uint64_t seed = 0;
    {
      const auto res = std::from_chars(f[3].data(), f[3].data() + f[3].size(), seed);
      if (res.ec != std::errc{} || res.ptr != f[3].data() + f[3].size())
        throw std::runtime_error("parse_surface: bad seed at row " + std::to_string(r + 1));
    }
    const double rie = detail::parse_csv_double(f[4], r + 1, 5);
    const double err = detail::parse_csv_double(f[5], r + 1, 6);

    auto [it, inserted] = index.try_emplace({lambda0, alpha}, surface.cells.size());
    if (inserted) {
      GridCell cell;
      cell.lambda0 = lambda0;
      cell.alpha = alpha;
      surface.cells.push_back(std::move(cell));
    }
    GridCell& cell = surface.cells[it->second];
    cell.rie.push_back(rie);
    cell.err.push_back(err);
    if (std::find(seen_seeds.begin(), seen_seeds.end(), seed) == seen_seeds.end())
      seen_seeds.push_back(seed);
  }
  surface.seeds = std::move(seen_seeds);
  for (GridCell& cell : surface.cells) {
    cell.mean_rie = cell.rie.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : detail::mean_of(cell.rie);
    cell.mean_err = cell.err.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : detail::mean_of(cell.err);
  }
  return surface;
}

}  // namespace cssc
