#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>

#include <cstdint>
#include <stdexcept>
#include <string>

#include "cssc/data_matrix.hpp"
#include "cssc/labels.hpp"
#include "cssc/prng.hpp"

namespace cssc {

struct SyntheticData {
  DataMatrix data;
  Labels truth;
};

/// Draws n random d-dimensional subspaces of R^D (orthonormal bases from QR
/// of Gaussian matrices) with m unit-norm points each, adds isotropic
/// Gaussian noise of standard deviation noise_sigma, and renormalizes the
/// columns. Deterministic for a fixed seed.
inline SyntheticData generate_union_of_subspaces(int D, int n, int d, int m, double noise_sigma,
                                                 std::uint64_t seed) {
  if (D < 1 || n < 1 || d < 1 || m < 1)
    throw std::invalid_argument("generate_union_of_subspaces: D, n, d, m must be positive");
  if (d >= D)
    throw std::invalid_argument("generate_union_of_subspaces: subspace dimension d=" +
                                std::to_string(d) + " must be < ambient D=" + std::to_string(D));
  if (noise_sigma < 0.0)
    throw std::invalid_argument("generate_union_of_subspaces: noise_sigma must be >= 0");

  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto randn = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = gauss(rng);
    return g;
  };

  const int N = n * m;
  Eigen::MatrixXd X(D, N);
  std::vector<int> labels(static_cast<std::size_t>(N));
  for (int s = 0; s < n; ++s) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(randn(D, d));
    const Eigen::MatrixXd basis =
        qr.householderQ() * Eigen::MatrixXd::Identity(D, d);
    for (int k = 0; k < m; ++k) {
      const int col = s * m + k;
      Eigen::VectorXd point;
      do {
        point = basis * randn(d, 1);
      } while (point.norm() < 1e-12);
      point.normalize();
      if (noise_sigma > 0.0) point += noise_sigma * randn(D, 1);
      X.col(col) = point.normalized();
      labels[static_cast<std::size_t>(col)] = s + 1;
    }
  }

  SyntheticData out;
  out.data.values = std::move(X);
  out.truth = Labels{std::move(labels), n};
  return out;
}

}  // namespace cssc
