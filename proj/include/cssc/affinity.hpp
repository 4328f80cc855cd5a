#pragma once

#include <Eigen/Dense>

#include <stdexcept>

#include "cssc/labels.hpp"

namespace cssc {

/// Symmetric nonnegative affinity with its degree vector. The unnormalized
/// graph Laplacian is D - A.
struct AffinityMatrix {
  Eigen::MatrixXd values;
  Eigen::VectorXd degree;

  Eigen::Index size() const { return values.rows(); }

  Eigen::MatrixXd laplacian() const {
    Eigen::MatrixXd L = -values;
    L.diagonal() += degree;
    return L;
  }
};

/// A = (|C| + |C^T|) / 2, degrees as column sums of A.
inline AffinityMatrix affinity_from_coefficients(const Eigen::MatrixXd& C) {
  if (C.rows() != C.cols())
    throw std::invalid_argument("affinity_from_coefficients: coefficient matrix must be square");
  AffinityMatrix A;
  A.values = (C.cwiseAbs() + C.transpose().cwiseAbs()) / 2.0;
  A.degree = A.values.colwise().sum().transpose();
  return A;
}

/// Segmentation-weighted l1 norm of C: the total absolute coefficient mass
/// on pairs the segmentation separates. Zero iff C connects no two points
/// from different clusters.
inline double subspace_structured_norm(const Eigen::MatrixXd& C, const Labels& segmentation) {
  const Eigen::Index N = C.rows();
  if (C.cols() != N || segmentation.size() != N)
    throw std::invalid_argument("subspace_structured_norm: dimension mismatch");
  double total = 0.0;
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index i = 0; i < N; ++i)
      if (segmentation[static_cast<int>(i)] != segmentation[static_cast<int>(j)])
        total += std::abs(C(i, j));
  return total;
}

}  // namespace cssc
