#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cssc/labels.hpp"
#include "cssc/prng.hpp"

namespace cssc {

enum class ConstraintKind { must_link, cannot_link };

struct Constraint {
  int i = 0;
  int j = 0;
  ConstraintKind kind = ConstraintKind::must_link;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[parent_[static_cast<std::size_t>(x)]];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent_[static_cast<std::size_t>(find(a))] = find(b); }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

/// Pairwise side-information over a population of N points: unordered
/// must-link / cannot-link pairs, validated for duplicates and consistency
/// (the transitive closure of must-links may not contain a cannot-link pair).
class ConstraintSet {
 public:
  ConstraintSet(std::vector<Constraint> pairs, int population) : population_(population) {
    if (population < 0) throw std::invalid_argument("ConstraintSet: negative population");
    pairs_.reserve(pairs.size());
    std::set<std::pair<int, int>> seen;
    for (Constraint c : pairs) {
      if (c.i == c.j)
        throw std::invalid_argument("ConstraintSet: self-pair (" + std::to_string(c.i) + "," +
                                    std::to_string(c.j) + ")");
      if (c.i > c.j) std::swap(c.i, c.j);
      if (c.i < 0 || c.j >= population)
        throw std::invalid_argument("ConstraintSet: pair (" + std::to_string(c.i) + "," +
                                    std::to_string(c.j) + ") out of range for N=" +
                                    std::to_string(population));
      if (!seen.insert({c.i, c.j}).second)
        throw std::invalid_argument("ConstraintSet: duplicate pair (" + std::to_string(c.i) + "," +
                                    std::to_string(c.j) + ")");
      pairs_.push_back(c);
    }
    check_consistency();
  }

  static ConstraintSet none(int population) { return ConstraintSet({}, population); }

  const std::vector<Constraint>& pairs() const { return pairs_; }
  int population() const { return population_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  /// Number of ordered entries of the observation set: twice the pair count,
  /// since observing (i,j) reveals (j,i) of the symmetric structure matrix.
  std::size_t ordered_count() const { return 2 * pairs_.size(); }

  /// Connected components of the must-link graph; returns a component id per
  /// point in [0, component_count).
  std::vector<int> must_link_components() const {
    detail::UnionFind uf(population_);
    for (const Constraint& c : pairs_)
      if (c.kind == ConstraintKind::must_link) uf.unite(c.i, c.j);
    std::vector<int> comp(static_cast<std::size_t>(population_), -1);
    int next = 0;
    for (int x = 0; x < population_; ++x)
      if (uf.find(x) == x) comp[static_cast<std::size_t>(x)] = next++;
    for (int x = 0; x < population_; ++x)
      comp[static_cast<std::size_t>(x)] = comp[static_cast<std::size_t>(uf.find(x))];
    return comp;
  }

 private:
  void check_consistency() const {
    detail::UnionFind uf(population_);
    for (const Constraint& c : pairs_)
      if (c.kind == ConstraintKind::must_link) uf.unite(c.i, c.j);
    for (const Constraint& c : pairs_) {
      if (c.kind == ConstraintKind::cannot_link && uf.find(c.i) == uf.find(c.j))
        throw std::invalid_argument(
            "ConstraintSet: inconsistent constraints, cannot-link (" + std::to_string(c.i) + "," +
            std::to_string(c.j) + ") joins points connected by must-links");
    }
  }

  std::vector<Constraint> pairs_;
  int population_ = 0;
};

/// Samples floor(p * N(N-1)/2) distinct unordered pairs uniformly without
/// replacement and labels each by the ground-truth relation.
inline ConstraintSet sample_side_information(const Labels& truth, double p, std::uint64_t seed) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("sample_side_information: p must be in [0,1], got " + std::to_string(p));
  const int N = truth.size();
  std::vector<std::pair<int, int>> all;
  all.reserve(static_cast<std::size_t>(N) * (N - 1) / 2);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) all.push_back({i, j});
  const auto total = all.size();
  const auto count = static_cast<std::size_t>(std::floor(p * static_cast<double>(total)));

  auto rng = make_rng(seed);
  std::vector<Constraint> pairs;
  pairs.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, total - 1);
    std::swap(all[k], all[pick(rng)]);
    const auto [i, j] = all[k];
    const ConstraintKind kind =
        truth[i] == truth[j] ? ConstraintKind::must_link : ConstraintKind::cannot_link;
    pairs.push_back({i, j, kind});
  }
  return ConstraintSet(std::move(pairs), N);
}

/// Samples each unordered pair independently with probability p (mirrored to
/// ordered entries). This is the sampling model the estimator's deviation
/// bound assumes; the fixed-proportion sampler above is the experiment
/// protocol. May return an empty set.
inline ConstraintSet sample_side_information_bernoulli(const Labels& truth, double p,
                                                       std::uint64_t seed) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("sample_side_information_bernoulli: p must be in [0,1]");
  const int N = truth.size();
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Constraint> pairs;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (unit(rng) < p)
        pairs.push_back({i, j,
                         truth[i] == truth[j] ? ConstraintKind::must_link
                                              : ConstraintKind::cannot_link});
  return ConstraintSet(std::move(pairs), N);
}

/// Weight matrix over coefficient entries: e^{-1} on must-link pairs, e^{+1}
/// on cannot-link pairs, 1 elsewhere (symmetric, unit diagonal).
/// `cannot_link_scale` > 1 multiplies cannot-link weights for near-hard
/// exclusion; the default keeps the plain {e^-1, 1, e} weights.
inline Eigen::MatrixXd build_weight_matrix(const ConstraintSet& cs, double cannot_link_scale = 1.0) {
  const int N = cs.population();
  Eigen::MatrixXd psi = Eigen::MatrixXd::Ones(N, N);
  const double ml = std::exp(-1.0);
  const double cl = std::exp(1.0) * cannot_link_scale;
  for (const Constraint& c : cs.pairs()) {
    const double w = c.kind == ConstraintKind::must_link ? ml : cl;
    psi(c.i, c.j) = w;
    psi(c.j, c.i) = w;
  }
  return psi;
}

}  // namespace cssc
