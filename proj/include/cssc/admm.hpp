#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "cssc/data_matrix.hpp"
#include "cssc/labels.hpp"

namespace cssc {

enum class ErrorNorm { frobenius, l1 };

struct SolverOptions {
  double lambda = 1.0;  // data-fit tradeoff
  double rho = 100.0;   // ADMM penalty
  int max_iters = 2000;
  double tol_abs = 1e-6;
  double tol_rel = 1e-4;
  ErrorNorm error_norm = ErrorNorm::frobenius;

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("SolverOptions: lambda must be > 0");
    if (!(rho > 0.0)) throw std::invalid_argument("SolverOptions: rho must be > 0");
    if (max_iters < 1) throw std::invalid_argument("SolverOptions: max_iters must be >= 1");
    if (!(tol_abs > 0.0) || !(tol_rel > 0.0))
      throw std::invalid_argument("SolverOptions: tolerances must be > 0");
  }
};

struct SparseSolution {
  Eigen::MatrixXd coefficients;  // N x N, zero diagonal
  bool converged = false;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

namespace detail {

inline Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& v, const Eigen::MatrixXd& thresh) {
  return (v.array().abs() - thresh.array()).max(0.0) * v.array().sign();
}

inline double l1_norm(const Eigen::MatrixXd& m) { return m.array().abs().sum(); }

}  // namespace detail

/// Value of the weighted sparse self-expression objective
///   ||W .* C||_1 + (lambda/2) ||X - X C||_F^2      (frobenius)
///   ||W .* C||_1 +  lambda    ||X - X C||_1        (l1)
inline double selfexpress_objective(const DataMatrix& X, const Eigen::MatrixXd& C,
                                    const Eigen::MatrixXd& W, const SolverOptions& opts) {
  const Eigen::MatrixXd residual = X.values - X.values * C;
  const double fit = opts.error_norm == ErrorNorm::frobenius
                         ? 0.5 * opts.lambda * residual.squaredNorm()
                         : opts.lambda * detail::l1_norm(residual);
  return detail::l1_norm(W.cwiseProduct(C)) + fit;
}

/// Solves the entrywise-weighted sparse self-expression problem
///   min_C ||W .* C||_1 + lambda * fit(X - X C)   s.t.  diag(C) = 0
/// by ADMM with an auxiliary copy J of C. The quadratic system matrix is
/// factored once and reused across iterations; stopping follows the combined
/// absolute/relative residual rule. On hitting max_iters the best iterate is
/// returned with converged = false.
inline SparseSolution solve_weighted_sparse(const DataMatrix& X, const Eigen::MatrixXd& W,
                                            const SolverOptions& opts) {
  opts.validate();
  const Eigen::Index N = X.samples();
  if (W.rows() != N || W.cols() != N)
    throw std::invalid_argument("solve_weighted_sparse: weight matrix must be N x N");
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index i = 0; i < N; ++i)
      if (i != j && !(W(i, j) > 0.0))
        throw std::invalid_argument("solve_weighted_sparse: off-diagonal weight at (" +
                                    std::to_string(i) + "," + std::to_string(j) +
                                    ") must be positive");

  const double lambda = opts.lambda;
  const double rho = opts.rho;
  const Eigen::MatrixXd gram = X.values.transpose() * X.values;
  const Eigen::MatrixXd thresh = W / rho;

  SparseSolution sol;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(N, N);  // scaled dual for J = C

  const double root_primal_dim = std::sqrt(static_cast<double>(N * N));

  if (opts.error_norm == ErrorNorm::frobenius) {
    Eigen::LLT<Eigen::MatrixXd> llt(lambda * gram + rho * Eigen::MatrixXd::Identity(N, N));
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("solve_weighted_sparse: factorization of the J-update system failed");
    const Eigen::MatrixXd lam_gram = lambda * gram;

    for (int it = 1; it <= opts.max_iters; ++it) {
      J = llt.solve(lam_gram + rho * (C - U));
      const Eigen::MatrixXd C_prev = C;
      C = detail::soft_threshold(J + U, thresh);
      C.diagonal().setZero();
      U += J - C;

      const double r_pri = (J - C).norm();
      const double r_dual = rho * (C - C_prev).norm();
      if (!std::isfinite(r_pri) || !std::isfinite(r_dual))
        throw std::runtime_error("solve_weighted_sparse: non-finite values at iteration " +
                                 std::to_string(it));
      const double eps_pri =
          root_primal_dim * opts.tol_abs + opts.tol_rel * std::max(J.norm(), C.norm());
      const double eps_dual = root_primal_dim * opts.tol_abs + opts.tol_rel * rho * U.norm();
      sol.iterations = it;
      sol.primal_residual = r_pri;
      sol.dual_residual = r_dual;
      if (r_pri <= eps_pri && r_dual <= eps_dual) {
        sol.converged = true;
        break;
      }
    }
  } else {
    // l1 error model: split off E = X - X J as a second block.
    Eigen::LLT<Eigen::MatrixXd> llt(gram + Eigen::MatrixXd::Identity(N, N));
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("solve_weighted_sparse: factorization of the J-update system failed");
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(X.dims(), N);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(X.dims(), N);  // scaled dual for X J + E = X
    const Eigen::MatrixXd e_thresh = Eigen::MatrixXd::Constant(X.dims(), N, lambda / rho);
    const double root_dim = std::sqrt(static_cast<double>(N * N + X.dims() * N));

    for (int it = 1; it <= opts.max_iters; ++it) {
      J = llt.solve(C - U + X.values.transpose() * (X.values - E - V));
      const Eigen::MatrixXd C_prev = C;
      const Eigen::MatrixXd E_prev = E;
      C = detail::soft_threshold(J + U, thresh);
      C.diagonal().setZero();
      const Eigen::MatrixXd XJ = X.values * J;
      E = detail::soft_threshold(X.values - XJ - V, e_thresh);
      U += J - C;
      V += XJ + E - X.values;

      const double r_pri = std::sqrt((J - C).squaredNorm() + (XJ + E - X.values).squaredNorm());
      const double r_dual =
          rho * ((C - C_prev) + X.values.transpose() * (E - E_prev)).norm();
      if (!std::isfinite(r_pri) || !std::isfinite(r_dual))
        throw std::runtime_error("solve_weighted_sparse: non-finite values at iteration " +
                                 std::to_string(it));
      const double eps_pri =
          root_dim * opts.tol_abs +
          opts.tol_rel * std::max({J.norm(), C.norm(), E.norm(), X.values.norm()});
      const double eps_dual =
          root_primal_dim * opts.tol_abs +
          opts.tol_rel * rho * (U + X.values.transpose() * V).norm();
      sol.iterations = it;
      sol.primal_residual = r_pri;
      sol.dual_residual = r_dual;
      if (r_pri <= eps_pri && r_dual <= eps_dual) {
        sol.converged = true;
        break;
      }
    }
  }

  C.diagonal().setZero();
  sol.coefficients = std::move(C);
  return sol;
}

/// Scaling rule mapping the dimensionless lambda0 to the solver's lambda:
/// lambda = lambda0 / min_j max_{i != j} <x_i, x_j>. Requires normalized
/// columns and a positive denominator.
inline double lambda_from_lambda0(const DataMatrix& X, double lambda0) {
  if (!(lambda0 > 0.0)) throw std::invalid_argument("lambda_from_lambda0: lambda0 must be > 0");
  const Eigen::Index N = X.samples();
  if (N < 2) throw std::invalid_argument("lambda_from_lambda0: needs at least two columns");
  const Eigen::MatrixXd gram = X.values.transpose() * X.values;
  double denom = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < N; ++j) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < N; ++i)
      if (i != j) best = std::max(best, gram(i, j));
    denom = std::min(denom, best);
  }
  if (!(denom > 0.0))
    throw std::invalid_argument(
        "lambda_from_lambda0: min-max inner product is " + std::to_string(denom) +
        "; the scaling rule is undefined, supply lambda directly");
  return lambda0 / denom;
}

/// Elementwise solver weights coupling the side-information weights psi with
/// the current segmentation: W_ij = psi_ij + alpha for pairs assigned to
/// different clusters, W_ij = psi_ij otherwise.
inline Eigen::MatrixXd combine_structured_weights(const Eigen::MatrixXd& psi,
                                                  const Labels& segmentation, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("combine_structured_weights: alpha must be >= 0");
  const Eigen::Index N = psi.rows();
  if (psi.cols() != N || segmentation.size() != N)
    throw std::invalid_argument("combine_structured_weights: dimension mismatch");
  Eigen::MatrixXd W = psi;
  if (alpha == 0.0) return W;
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index i = 0; i < N; ++i)
      if (segmentation[static_cast<int>(i)] != segmentation[static_cast<int>(j)]) W(i, j) += alpha;
  return W;
}

}  // namespace cssc
