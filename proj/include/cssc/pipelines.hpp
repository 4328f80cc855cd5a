#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cssc/admm.hpp"
#include "cssc/affinity.hpp"
#include "cssc/constraints.hpp"
#include "cssc/data_matrix.hpp"
#include "cssc/kmeans.hpp"
#include "cssc/labels.hpp"
#include "cssc/lsr.hpp"
#include "cssc/metrics.hpp"
#include "cssc/spectral_embedding.hpp"

namespace cssc {

struct PipelineOptions {
  int n = 2;                       // number of clusters
  std::uint64_t seed = 0;          // quantization seed, fixed across alternations
  SolverOptions solver;
  KMeansOptions kmeans;
  EmbeddingOptions embedding;
  double cannot_link_scale = 1.0;  // >1 pushes cannot-links toward hard exclusion

  void validate() const {
    if (n < 1) throw std::invalid_argument("PipelineOptions: n must be >= 1");
    if (!(cannot_link_scale >= 1.0))
      throw std::invalid_argument("PipelineOptions: cannot_link_scale must be >= 1");
    solver.validate();
    kmeans.validate();
    embedding.validate();
  }
};

struct ClusteringResult {
  Labels labels;
  Eigen::MatrixXd coefficients;
  bool converged = false;
  int iterations = 0;  // outer alternations; 1 for single-pass pipelines
  std::vector<double> objective_trace;
};

namespace detail {

inline Labels quantize(const Eigen::MatrixXd& C, const PipelineOptions& opts,
                       const ConstraintSet* cs) {
  const AffinityMatrix A = affinity_from_coefficients(C);
  const Eigen::MatrixXd E = spectral_embedding(A, opts.n, opts.embedding);
  if (cs != nullptr) return constrained_kmeans(E, opts.n, *cs, opts.seed, opts.kmeans);
  return kmeans(E, opts.n, opts.seed, opts.kmeans);
}

inline ClusteringResult run_weighted_pipeline(const DataMatrix& X, const Eigen::MatrixXd& W,
                                              const PipelineOptions& opts,
                                              const ConstraintSet* quantize_cs) {
  opts.validate();
  ClusteringResult result;
  SparseSolution sol = solve_weighted_sparse(X, W, opts.solver);
  result.labels = quantize(sol.coefficients, opts, quantize_cs);
  result.objective_trace.push_back(selfexpress_objective(X, sol.coefficients, W, opts.solver));
  result.coefficients = std::move(sol.coefficients);
  result.converged = sol.converged;
  result.iterations = 1;
  return result;
}

}  // namespace detail

/// Sparse self-expression with uniform weights, then spectral quantization.
inline ClusteringResult run_ssc(const DataMatrix& X, const PipelineOptions& opts) {
  const Eigen::Index N = X.samples();
  return detail::run_weighted_pipeline(X, Eigen::MatrixXd::Ones(N, N), opts, nullptr);
}

/// As run_ssc, but the k-means stage honors the constraints.
inline ClusteringResult run_ssc_plus(const DataMatrix& X, const ConstraintSet& cs,
                                     const PipelineOptions& opts) {
  const Eigen::Index N = X.samples();
  return detail::run_weighted_pipeline(X, Eigen::MatrixXd::Ones(N, N), opts, &cs);
}

/// Side-information enters through the solver weights only; quantization is
/// unconstrained.
inline ClusteringResult run_cssc(const DataMatrix& X, const ConstraintSet& cs,
                                 const PipelineOptions& opts) {
  return detail::run_weighted_pipeline(X, build_weight_matrix(cs, opts.cannot_link_scale), opts,
                                       nullptr);
}

/// Side-information enters both the solver weights and the k-means stage;
/// returned labels satisfy every constraint.
inline ClusteringResult run_cssc_plus(const DataMatrix& X, const ConstraintSet& cs,
                                      const PipelineOptions& opts) {
  return detail::run_weighted_pipeline(X, build_weight_matrix(cs, opts.cannot_link_scale), opts,
                                       &cs);
}

namespace detail {

/// Alternates the weighted solve with spectral quantization, coupling the
/// weights to the current segmentation through alpha. The k-means seed is
/// held fixed across alternations, so an unchanged coefficient matrix
/// reproduces the segmentation exactly and the loop stops.
inline ClusteringResult run_alternating(const DataMatrix& X, const ConstraintSet& cs, double alpha,
                                        const PipelineOptions& opts, int T_max,
                                        const ConstraintSet* quantize_cs) {
  opts.validate();
  if (alpha < 0.0) throw std::invalid_argument("run_alternating: alpha must be >= 0");
  if (T_max < 1) throw std::invalid_argument("run_alternating: T_max must be >= 1");

  const Eigen::MatrixXd psi = build_weight_matrix(cs, opts.cannot_link_scale);

  ClusteringResult result = run_weighted_pipeline(X, psi, opts, quantize_cs);
  result.objective_trace[0] +=
      alpha * subspace_structured_norm(result.coefficients, result.labels);
  result.iterations = 0;

  for (int t = 1; t <= T_max; ++t) {
    const Eigen::MatrixXd W = combine_structured_weights(psi, result.labels, alpha);
    SparseSolution sol = solve_weighted_sparse(X, W, opts.solver);
    Labels next = quantize(sol.coefficients, opts, quantize_cs);
    result.objective_trace.push_back(
        selfexpress_objective(X, sol.coefficients, psi, opts.solver) +
        alpha * subspace_structured_norm(sol.coefficients, next));
    result.iterations = t;
    const bool fixed_point = same_partition(next, result.labels);
    result.coefficients = std::move(sol.coefficients);
    result.labels = std::move(next);
    result.converged = sol.converged;
    if (fixed_point) return result;
  }
  result.converged = false;
  return result;
}

}  // namespace detail

/// Structured variant: segmentation-coupled weights, unconstrained k-means.
inline ClusteringResult run_cs3c(const DataMatrix& X, const ConstraintSet& cs, double alpha,
                                 const PipelineOptions& opts, int T_max = 10) {
  return detail::run_alternating(X, cs, alpha, opts, T_max, nullptr);
}

/// Structured variant with constrained k-means; labels are feasible at every
/// outer iteration.
inline ClusteringResult run_cs3c_plus(const DataMatrix& X, const ConstraintSet& cs, double alpha,
                                      const PipelineOptions& opts, int T_max = 10) {
  return detail::run_alternating(X, cs, alpha, opts, T_max, &cs);
}

/// Ridge-regression baseline; constraints, when given, act only in the
/// k-means stage.
inline ClusteringResult run_lsr(const DataMatrix& X, double lambda, LsrVariant variant,
                                const PipelineOptions& opts,
                                const ConstraintSet* cs = nullptr) {
  opts.validate();
  ClusteringResult result;
  result.coefficients = solve_lsr(X, lambda, variant);
  result.labels = detail::quantize(result.coefficients, opts, cs);
  result.objective_trace.push_back((X.values - X.values * result.coefficients).squaredNorm() +
                                   lambda * result.coefficients.squaredNorm());
  result.converged = true;
  result.iterations = 1;
  return result;
}

enum class Method {
  ssc,
  ssc_plus,
  cssc,
  cssc_plus,
  cs3c,
  cs3c_plus,
  lsr1,
  lsr2,
  lsr1_plus,
  lsr2_plus,
};

inline Method parse_method(const std::string& s) {
  if (s == "ssc") return Method::ssc;
  if (s == "ssc_plus") return Method::ssc_plus;
  if (s == "cssc") return Method::cssc;
  if (s == "cssc_plus") return Method::cssc_plus;
  if (s == "cs3c") return Method::cs3c;
  if (s == "cs3c_plus") return Method::cs3c_plus;
  if (s == "lsr1") return Method::lsr1;
  if (s == "lsr2") return Method::lsr2;
  if (s == "lsr1_plus") return Method::lsr1_plus;
  if (s == "lsr2_plus") return Method::lsr2_plus;
  throw std::invalid_argument("parse_method: unknown method '" + s + "'");
}

inline std::string method_name(Method m) {
  switch (m) {
    case Method::ssc: return "ssc";
    case Method::ssc_plus: return "ssc_plus";
    case Method::cssc: return "cssc";
    case Method::cssc_plus: return "cssc_plus";
    case Method::cs3c: return "cs3c";
    case Method::cs3c_plus: return "cs3c_plus";
    case Method::lsr1: return "lsr1";
    case Method::lsr2: return "lsr2";
    case Method::lsr1_plus: return "lsr1_plus";
    case Method::lsr2_plus: return "lsr2_plus";
  }
  throw std::logic_error("method_name: unreachable");
}

/// True when the method consumes pairwise side-information anywhere.
inline bool method_uses_constraints(Method m) {
  return m != Method::ssc && m != Method::lsr1 && m != Method::lsr2;
}

/// True when the k-means stage enforces the constraints (the "+" family).
inline bool method_constrains_kmeans(Method m) {
  switch (m) {
    case Method::ssc_plus:
    case Method::cssc_plus:
    case Method::cs3c_plus:
    case Method::lsr1_plus:
    case Method::lsr2_plus:
      return true;
    default:
      return false;
  }
}

inline bool method_uses_alpha(Method m) {
  return m == Method::cs3c || m == Method::cs3c_plus;
}

inline bool method_is_lsr(Method m) {
  return m == Method::lsr1 || m == Method::lsr2 || m == Method::lsr1_plus ||
         m == Method::lsr2_plus;
}

/// Single entry point used by the command-line driver and the grid search.
/// `alpha` and `T_max` are consulted only by the structured variants; the
/// LSR family reads its ridge parameter from opts.solver.lambda.
inline ClusteringResult run_method(Method m, const DataMatrix& X, const ConstraintSet& cs,
                                   const PipelineOptions& opts, double alpha = 0.0,
                                   int T_max = 10) {
  switch (m) {
    case Method::ssc: return run_ssc(X, opts);
    case Method::ssc_plus: return run_ssc_plus(X, cs, opts);
    case Method::cssc: return run_cssc(X, cs, opts);
    case Method::cssc_plus: return run_cssc_plus(X, cs, opts);
    case Method::cs3c: return run_cs3c(X, cs, alpha, opts, T_max);
    case Method::cs3c_plus: return run_cs3c_plus(X, cs, alpha, opts, T_max);
    case Method::lsr1: return run_lsr(X, opts.solver.lambda, LsrVariant::lsr1, opts, nullptr);
    case Method::lsr2: return run_lsr(X, opts.solver.lambda, LsrVariant::lsr2, opts, nullptr);
    case Method::lsr1_plus: return run_lsr(X, opts.solver.lambda, LsrVariant::lsr1, opts, &cs);
    case Method::lsr2_plus: return run_lsr(X, opts.solver.lambda, LsrVariant::lsr2, opts, &cs);
  }
  throw std::logic_error("run_method: unreachable");
}

}  // namespace cssc
