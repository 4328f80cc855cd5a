#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <stdexcept>
#include <string>

#include "cssc/data_matrix.hpp"

namespace cssc {

/// lsr2 keeps the diagonal free; lsr1 enforces diag(C) = 0.
enum class LsrVariant { lsr2, lsr1 };

inline LsrVariant parse_lsr_variant(const std::string& s) {
  if (s == "lsr1") return LsrVariant::lsr1;
  if (s == "lsr2") return LsrVariant::lsr2;
  throw std::invalid_argument("parse_lsr_variant: unknown variant '" + s + "'");
}

/// Ridge-regularized least-squares self-expression, solved in closed form.
///   lsr2:  C = (X^T X + tau I)^{-1} X^T X
///   lsr1:  same objective with diag(C) = 0; with Z = (X^T X + tau I)^{-1},
///          C_ij = -Z_ij / Z_jj for i != j.
inline Eigen::MatrixXd solve_lsr(const DataMatrix& X, double lambda, LsrVariant variant) {
  if (!(lambda > 0.0)) throw std::invalid_argument("solve_lsr: lambda must be > 0");
  const Eigen::Index N = X.samples();
  const Eigen::MatrixXd gram = X.values.transpose() * X.values;
  Eigen::LLT<Eigen::MatrixXd> llt(gram + lambda * Eigen::MatrixXd::Identity(N, N));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("solve_lsr: factorization failed");
  if (variant == LsrVariant::lsr2) return llt.solve(gram);

  const Eigen::MatrixXd Z = llt.solve(Eigen::MatrixXd::Identity(N, N));
  Eigen::MatrixXd C(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    const double zjj = Z(j, j);
    if (!(zjj > 0.0))
      throw std::runtime_error("solve_lsr: nonpositive diagonal in the resolvent at column " +
                               std::to_string(j));
    for (Eigen::Index i = 0; i < N; ++i) C(i, j) = i == j ? 0.0 : -Z(i, j) / zjj;
  }
  return C;
}

}  // namespace cssc
