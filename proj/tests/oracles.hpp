#pragma once

// Independent reference implementations used only by the test suite. Each
// deliberately takes a different algorithmic route than the library so the
// two sides can cross-check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "cssc/constraints.hpp"
#include "cssc/data_matrix.hpp"
#include "cssc/kmeans.hpp"
#include "cssc/labels.hpp"

namespace oracles {

/// Accelerated proximal-gradient minimizer of
///   ||W .* C||_1 + (lambda/2) ||X - X C||_F^2,  diag(C) = 0.
/// Convergence is monitored on the objective; tiny instances only.
inline Eigen::MatrixXd fista_weighted_sparse(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                                             double lambda, int max_iters = 200000,
                                             double tol = 1e-12) {
  const Eigen::Index N = X.cols();
  const Eigen::MatrixXd G = X.transpose() * X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  const double L = lambda * eig.eigenvalues().maxCoeff();

  auto objective = [&](const Eigen::MatrixXd& C) {
    return (W.cwiseProduct(C)).array().abs().sum() +
           0.5 * lambda * (X - X * C).squaredNorm();
  };

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd Y = C;
  double t = 1.0;
  double prev_obj = objective(C);
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::MatrixXd grad = lambda * (G * Y - G);
    Eigen::MatrixXd C_next = Y - grad / L;
    const Eigen::ArrayXXd thresh = W.array() / L;
    C_next = ((C_next.array().abs() - thresh).max(0.0) * C_next.array().sign()).matrix();
    C_next.diagonal().setZero();

    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    Y = C_next + ((t - 1.0) / t_next) * (C_next - C);
    C = C_next;
    t = t_next;

    if (it % 50 == 49) {
      const double obj = objective(C);
      if (std::abs(prev_obj - obj) <= tol * std::max(1.0, std::abs(obj))) break;
      prev_obj = obj;
    }
  }
  return C;
}

/// Exact minimum of the scalar piecewise-linear problem
///   min_c w |c| + lambda * || target - c * basis ||_1
/// by enumerating the breakpoints {0} and {target_k / basis_k}.
inline double scalar_l1_fit_minimum(const Eigen::VectorXd& target, const Eigen::VectorXd& basis,
                                    double w, double lambda) {
  std::vector<double> candidates{0.0};
  for (Eigen::Index k = 0; k < basis.size(); ++k)
    if (basis(k) != 0.0) candidates.push_back(target(k) / basis(k));
  double best = std::numeric_limits<double>::infinity();
  for (double c : candidates) {
    const double value = w * std::abs(c) + lambda * (target - c * basis).lpNorm<1>();
    best = std::min(best, value);
  }
  return best;
}

/// Clustering error by exhaustive search over all matchings of the label
/// alphabets; n! permutations, so n <= 8 or so.
inline double brute_force_clustering_error(const cssc::Labels& pred, const cssc::Labels& truth) {
  const int N = pred.size();
  const int K = std::max(pred.n, truth.n);
  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  int best = -1;
  do {
    int matches = 0;
    for (int i = 0; i < N; ++i)
      if (perm[static_cast<std::size_t>(truth[i] - 1)] == pred[i] - 1) ++matches;
    best = std::max(best, matches);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return 1.0 - static_cast<double>(best) / static_cast<double>(N);
}

/// Minimum within-cluster sum of squares over every constraint-satisfying
/// assignment of N points into at most n clusters. Exponential; N <= 12.
inline double brute_force_feasible_wcss(const Eigen::MatrixXd& points, int n,
                                        const cssc::ConstraintSet& cs) {
  const int N = static_cast<int>(points.rows());
  std::vector<int> assign(static_cast<std::size_t>(N), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    bool feasible = true;
    for (const cssc::Constraint& c : cs.pairs()) {
      const bool together = assign[static_cast<std::size_t>(c.i)] ==
                            assign[static_cast<std::size_t>(c.j)];
      if (c.kind == cssc::ConstraintKind::must_link ? !together : together) {
        feasible = false;
        break;
      }
    }
    if (feasible) {
      cssc::Labels l;
      l.n = n;
      l.assignments.resize(static_cast<std::size_t>(N));
      for (int i = 0; i < N; ++i) l.assignments[static_cast<std::size_t>(i)] = assign[static_cast<std::size_t>(i)] + 1;
      best = std::min(best, cssc::within_cluster_ss(points, l));
    }
    int pos = N - 1;
    while (pos >= 0 && assign[static_cast<std::size_t>(pos)] == n - 1) {
      assign[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++assign[static_cast<std::size_t>(pos)];
  }
  return best;
}

/// Spearman rank correlation with average ranks on ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> ra = ranks(a);
  const std::vector<double> rb = ranks(b);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(da * db);
}

/// Ridge self-expression with an excluded diagonal, solved column by column
/// on the deleted design matrix (the slow, obviously-correct route).
inline Eigen::MatrixXd column_deletion_ridge(const Eigen::MatrixXd& X, double lambda) {
  const Eigen::Index N = X.cols();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    Eigen::MatrixXd Xm(X.rows(), N - 1);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < N; ++i)
      if (i != j) Xm.col(col++) = X.col(i);
    const Eigen::VectorXd c =
        (Xm.transpose() * Xm + lambda * Eigen::MatrixXd::Identity(N - 1, N - 1))
            .ldlt()
            .solve(Xm.transpose() * X.col(j));
    col = 0;
    for (Eigen::Index i = 0; i < N; ++i)
      if (i != j) C(i, j) = c(col++);
  }
  return C;
}

/// Random labels for metric tests; every id in {1..n}.
inline cssc::Labels random_labels(int N, int n, std::mt19937_64& rng) {
  cssc::Labels l;
  l.n = n;
  l.assignments.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    l.assignments[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
  return l;
}

/// Random unit-column data matrix.
inline cssc::DataMatrix random_data(int D, int N, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  cssc::DataMatrix X;
  X.values.resize(D, N);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < D; ++i) X.values(i, j) = gauss(rng);
    X.values.col(j).normalize();
  }
  return X;
}

/// Random indicator segmentation with every cluster nonempty (n <= N).
inline cssc::Labels random_segmentation(int N, int n, std::mt19937_64& rng) {
  cssc::Labels l;
  l.n = n;
  l.assignments.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    l.assignments[static_cast<std::size_t>(i)] = i < n ? i + 1 : 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
  return l;
}

}  // namespace oracles
