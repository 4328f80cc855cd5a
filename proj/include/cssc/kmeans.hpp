#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cssc/constraints.hpp"
#include "cssc/labels.hpp"
#include "cssc/prng.hpp"

namespace cssc {

struct KMeansOptions {
  int restarts = 20;
  int max_iterations = 300;

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("KMeansOptions: restarts must be >= 1");
    if (max_iterations < 1)
      throw std::invalid_argument("KMeansOptions: max_iterations must be >= 1");
  }
};

inline double within_cluster_ss(const Eigen::MatrixXd& points, const Labels& labels) {
  const Eigen::Index N = points.rows();
  if (labels.size() != N) throw std::invalid_argument("within_cluster_ss: size mismatch");
  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(labels.n, points.cols());
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(labels.n), 0);
  for (Eigen::Index i = 0; i < N; ++i) {
    const int k = labels[static_cast<int>(i)] - 1;
    centroids.row(k) += points.row(i);
    ++counts[static_cast<std::size_t>(k)];
  }
  for (int k = 0; k < labels.n; ++k)
    if (counts[static_cast<std::size_t>(k)] > 0)
      centroids.row(k) /= static_cast<double>(counts[static_cast<std::size_t>(k)]);
  double total = 0.0;
  for (Eigen::Index i = 0; i < N; ++i)
    total += (points.row(i) - centroids.row(labels[static_cast<int>(i)] - 1)).squaredNorm();
  return total;
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits, independent of any
/// library distribution implementation.
inline double canonical_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Index drawn with probability proportional to weights; falls back to the
/// first positive entry if rounding pushes the scan past the end.
inline int sample_weighted(const std::vector<double>& weights, double total,
                           std::mt19937_64& rng) {
  double u = canonical_double(rng) * total;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    u -= weights[s];
    if (u < 0.0) return static_cast<int>(s);
  }
  for (std::size_t s = weights.size(); s-- > 0;)
    if (weights[s] > 0.0) return static_cast<int>(s);
  return 0;
}

struct SuperPoints {
  Eigen::MatrixXd centroids;            // S x d, mass-weighted member means
  std::vector<double> mass;             // member counts
  std::vector<int> component;           // point -> super-point
  std::vector<std::vector<int>> cl_adj; // cannot-link neighbours per super-point
  std::vector<int> order;               // decreasing mass, ties by index
};

inline SuperPoints collapse_must_links(const Eigen::MatrixXd& points, const ConstraintSet& cs) {
  SuperPoints sp;
  sp.component = cs.must_link_components();
  const int S = 1 + *std::max_element(sp.component.begin(), sp.component.end());
  sp.mass.assign(static_cast<std::size_t>(S), 0.0);
  sp.centroids = Eigen::MatrixXd::Zero(S, points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int s = sp.component[static_cast<std::size_t>(i)];
    sp.centroids.row(s) += points.row(i);
    sp.mass[static_cast<std::size_t>(s)] += 1.0;
  }
  for (int s = 0; s < S; ++s) sp.centroids.row(s) /= sp.mass[static_cast<std::size_t>(s)];

  sp.cl_adj.assign(static_cast<std::size_t>(S), {});
  for (const Constraint& c : cs.pairs()) {
    if (c.kind != ConstraintKind::cannot_link) continue;
    const int a = sp.component[static_cast<std::size_t>(c.i)];
    const int b = sp.component[static_cast<std::size_t>(c.j)];
    if (a == b)
      throw std::invalid_argument(
          "constrained_kmeans: cannot-link (" + std::to_string(c.i) + "," + std::to_string(c.j) +
          ") joins points that must-links place together");
    sp.cl_adj[static_cast<std::size_t>(a)].push_back(b);
    sp.cl_adj[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& adj : sp.cl_adj) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }

  sp.order.resize(static_cast<std::size_t>(S));
  std::iota(sp.order.begin(), sp.order.end(), 0);
  std::stable_sort(sp.order.begin(), sp.order.end(), [&](int a, int b) {
    return sp.mass[static_cast<std::size_t>(a)] > sp.mass[static_cast<std::size_t>(b)];
  });
  return sp;
}

/// Mass-weighted k-means++ over super-points. When every remaining weight is
/// zero (coincident points, or fewer super-points than seats) the lowest
/// unchosen index fills the seat, duplicating a position if necessary.
inline Eigen::MatrixXd seed_centroids(const SuperPoints& sp, int n, std::mt19937_64& rng) {
  const int S = static_cast<int>(sp.mass.size());
  Eigen::MatrixXd centers(n, sp.centroids.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(S), false);
  std::vector<double> d2(static_cast<std::size_t>(S), 0.0);
  std::vector<double> weights(static_cast<std::size_t>(S), 0.0);

  for (int k = 0; k < n; ++k) {
    double total = 0.0;
    for (int s = 0; s < S; ++s) {
      weights[static_cast<std::size_t>(s)] =
          k == 0 ? sp.mass[static_cast<std::size_t>(s)]
                 : sp.mass[static_cast<std::size_t>(s)] * d2[static_cast<std::size_t>(s)];
      total += weights[static_cast<std::size_t>(s)];
    }
    int pick = -1;
    if (total > 0.0) {
      pick = sample_weighted(weights, total, rng);
    } else {
      for (int s = 0; s < S; ++s)
        if (!chosen[static_cast<std::size_t>(s)]) {
          pick = s;
          break;
        }
      if (pick < 0) pick = 0;
    }
    chosen[static_cast<std::size_t>(pick)] = true;
    centers.row(k) = sp.centroids.row(pick);
    for (int s = 0; s < S; ++s) {
      const double dist = (sp.centroids.row(s) - centers.row(k)).squaredNorm();
      d2[static_cast<std::size_t>(s)] = k == 0 ? dist : std::min(d2[static_cast<std::size_t>(s)], dist);
    }
  }
  return centers;
}

/// One restart of constrained Lloyd. Returns false when some super-point has
/// no cluster free of its cannot-link partners among those already placed.
inline bool lloyd_restart(const Eigen::MatrixXd& points, const SuperPoints& sp, int n,
                          std::mt19937_64& rng, int max_iterations,
                          std::vector<int>& assignment) {
  const int S = static_cast<int>(sp.mass.size());
  Eigen::MatrixXd centers = seed_centroids(sp, n, rng);
  assignment.assign(static_cast<std::size_t>(S), -1);
  std::vector<int> previous;

  for (int it = 0; it < max_iterations; ++it) {
    std::vector<int> next(static_cast<std::size_t>(S), -1);
    for (int s : sp.order) {
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k) {
        bool feasible = true;
        for (int partner : sp.cl_adj[static_cast<std::size_t>(s)])
          if (next[static_cast<std::size_t>(partner)] == k) {
            feasible = false;
            break;
          }
        if (!feasible) continue;
        const double d = (sp.centroids.row(s) - centers.row(k)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (best < 0) return false;
      next[static_cast<std::size_t>(s)] = best;
    }
    assignment = next;
    if (assignment == previous) break;
    previous = assignment;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n, points.cols());
    std::vector<double> masses(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s < S; ++s) {
      const int k = assignment[static_cast<std::size_t>(s)];
      sums.row(k) += sp.mass[static_cast<std::size_t>(s)] * sp.centroids.row(s);
      masses[static_cast<std::size_t>(k)] += sp.mass[static_cast<std::size_t>(s)];
    }
    for (int k = 0; k < n; ++k)
      if (masses[static_cast<std::size_t>(k)] > 0.0)
        centers.row(k) = sums.row(k) / masses[static_cast<std::size_t>(k)];
  }
  return true;
}

}  // namespace detail

/// COP-style constrained k-means on the rows of `points`. Must-link classes
/// are collapsed to mass-weighted super-points, cannot-links lift to
/// super-point pairs, and assignment is greedy in decreasing-mass order over
/// feasible centroids. Infeasible restarts are abandoned; the winner among
/// surviving restarts is the (WCSS, restart index) minimum.
inline Labels constrained_kmeans(const Eigen::MatrixXd& points, int n, const ConstraintSet& cs,
                                 std::uint64_t seed, const KMeansOptions& opts = {}) {
  opts.validate();
  const Eigen::Index N = points.rows();
  if (n < 1) throw std::invalid_argument("constrained_kmeans: cluster count must be >= 1");
  if (cs.population() != static_cast<int>(N))
    throw std::invalid_argument("constrained_kmeans: constraint population does not match points");

  const detail::SuperPoints sp = detail::collapse_must_links(points, cs);

  double best_wcss = std::numeric_limits<double>::infinity();
  std::vector<int> best_assignment;
  for (int r = 0; r < opts.restarts; ++r) {
    auto rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    std::vector<int> assignment;
    if (!detail::lloyd_restart(points, sp, n, rng, opts.max_iterations, assignment)) continue;

    Labels labels;
    labels.n = n;
    labels.assignments.resize(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i)
      labels.assignments[static_cast<std::size_t>(i)] =
          assignment[static_cast<std::size_t>(sp.component[static_cast<std::size_t>(i)])] + 1;
    const double wcss = within_cluster_ss(points, labels);
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_assignment = std::move(labels.assignments);
    }
  }
  if (best_assignment.empty())
    throw std::runtime_error("constrained_kmeans: no feasible assignment found in " +
                             std::to_string(opts.restarts) +
                             " restarts; increase restarts, or the constraints may be "
                             "infeasible with " + std::to_string(n) + " clusters");
  Labels out;
  out.n = n;
  out.assignments = std::move(best_assignment);
  out.validate();
  return out;
}

/// Plain k-means is the constrained engine with no constraints, so the two
/// agree bitwise for the same seed.
inline Labels kmeans(const Eigen::MatrixXd& points, int n, std::uint64_t seed,
                     const KMeansOptions& opts = {}) {
  return constrained_kmeans(points, n, ConstraintSet::none(static_cast<int>(points.rows())), seed,
                            opts);
}

}  // namespace cssc
