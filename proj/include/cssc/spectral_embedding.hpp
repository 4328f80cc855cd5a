#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

#include "cssc/affinity.hpp"

namespace cssc {

struct EmbeddingOptions {
  bool regularize_degree = false;  // adds degree_epsilon to every degree
  double degree_epsilon = 1e-10;

  void validate() const {
    if (regularize_degree && !(degree_epsilon > 0.0))
      throw std::invalid_argument("EmbeddingOptions: degree_epsilon must be > 0");
  }
};

/// Rows of the returned N x n matrix are the spectral coordinates of the
/// points: generalized eigenvectors of (L, D) for the n smallest eigenvalues,
/// computed via the symmetric normalized Laplacian and scaled back so that
/// E^T D E = I. Eigenvalue order (and ties) follow the solver's ascending
/// ordering.
inline Eigen::MatrixXd spectral_embedding(const AffinityMatrix& A, int n,
                                          const EmbeddingOptions& opts = {}) {
  opts.validate();
  const Eigen::Index N = A.size();
  if (n < 1 || n > N)
    throw std::invalid_argument("spectral_embedding: cluster count must be in [1, N]");
  Eigen::VectorXd deg = A.degree;
  if (opts.regularize_degree) deg.array() += opts.degree_epsilon;
  for (Eigen::Index i = 0; i < N; ++i)
    if (!(deg(i) > 0.0))
      throw std::invalid_argument("spectral_embedding: vertex " + std::to_string(i) +
                                  " has zero degree; its point is connected to nothing");

  const Eigen::VectorXd inv_sqrt = deg.array().rsqrt();
  // L_sym = D^{-1/2} (D - A) D^{-1/2}, symmetrized against rounding.
  Eigen::MatrixXd L_sym = -(inv_sqrt.asDiagonal() * A.values * inv_sqrt.asDiagonal());
  L_sym.diagonal().array() += 1.0;
  L_sym = ((L_sym + L_sym.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L_sym);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("spectral_embedding: eigendecomposition failed");
  return inv_sqrt.asDiagonal() * eig.eigenvectors().leftCols(n);
}

}  // namespace cssc
