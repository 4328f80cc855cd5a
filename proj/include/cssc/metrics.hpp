#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cssc/constraints.hpp"
#include "cssc/hungarian.hpp"
#include "cssc/labels.hpp"
#include "cssc/prng.hpp"

namespace cssc {

/// Pairwise disagreement indicator: entry (i, j) is 0 iff i and j share a
/// cluster (diagonal 0), 1 otherwise.
inline Eigen::MatrixXi structure_matrix(const Labels& labels) {
  labels.validate();
  const int N = static_cast<int>(labels.size());
  Eigen::MatrixXi theta(N, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) theta(i, j) = labels[i] != labels[j] ? 1 : 0;
  return theta;
}

/// Fraction of points misassigned under the best matching between the two
/// label alphabets (assignment problem on the padded confusion matrix).
inline double clustering_error(const Labels& pred, const Labels& truth) {
  pred.validate();
  truth.validate();
  if (pred.size() != truth.size())
    throw std::invalid_argument("clustering_error: label vectors differ in length (" +
                                std::to_string(pred.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
  const int N = static_cast<int>(pred.size());
  const int K = std::max(pred.n, truth.n);
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < N; ++i) confusion(truth[i] - 1, pred[i] - 1) += 1.0;
  const std::vector<int> matching = solve_assignment(-confusion);
  double matched = 0.0;
  for (int t = 0; t < K; ++t) matched += confusion(t, matching[static_cast<std::size_t>(t)]);
  return 1.0 - matched / static_cast<double>(N);
}

/// Pairwise-agreement accuracy over all ordered off-diagonal pairs.
inline double rand_index(const Labels& pred, const Labels& truth) {
  pred.validate();
  truth.validate();
  const int N = static_cast<int>(pred.size());
  if (truth.size() != N)
    throw std::invalid_argument("rand_index: label vectors differ in length");
  if (N < 2) throw std::invalid_argument("rand_index: needs at least two points");
  std::int64_t disagreements = 0;  // ordered pairs where exactly one partition separates
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      if (i == j) continue;
      const int a = pred[i] != pred[j] ? 1 : 0;
      const int b = truth[i] != truth[j] ? 1 : 0;
      disagreements += a == b ? 0 : 1;
    }
  return 1.0 - static_cast<double>(disagreements) /
                   static_cast<double>(static_cast<std::int64_t>(N) * N - N);
}

/// The pairwise-agreement accuracy restricted to the observed pairs: each
/// constraint contributes its mirrored ordered entries, which agree, so the
/// average over unordered pairs is the same value.
inline double rand_index_estimator(const Labels& pred, const ConstraintSet& cs) {
  pred.validate();
  if (static_cast<int>(pred.size()) != cs.population())
    throw std::invalid_argument("rand_index_estimator: labels and constraints disagree on N");
  if (cs.empty())
    throw std::invalid_argument("rand_index_estimator: constraint set is empty, nothing observed");
  std::int64_t disagreements = 0;
  for (const Constraint& c : cs.pairs()) {
    const int separated = pred[c.i] != pred[c.j] ? 1 : 0;
    const int expected = c.kind == ConstraintKind::cannot_link ? 1 : 0;
    disagreements += separated == expected ? 0 : 1;
  }
  return 1.0 - static_cast<double>(disagreements) / static_cast<double>(cs.size());
}

/// Deviation bound for the restricted estimator at observation rate p on N
/// points: 2 / (p N (N-1) - 1). Defined only where the denominator is
/// positive.
inline double rie_error_bound(double p, int N) {
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("rie_error_bound: p must lie in (0, 1]");
  if (N < 2) throw std::invalid_argument("rie_error_bound: N must be >= 2");
  const double denom = p * static_cast<double>(N) * static_cast<double>(N - 1) - 1.0;
  if (!(denom > 0.0))
    throw std::invalid_argument("rie_error_bound: p N (N-1) = " +
                                std::to_string(denom + 1.0) +
                                " must exceed 1 for the bound to be defined");
  return 2.0 / denom;
}

struct RieTrialRecord {
  int trial = 0;
  double mu = 0.0;        // full pairwise agreement
  double mu_hat = 0.0;    // restricted estimate
  double deviation = 0.0; // |mu_hat - mu|
};

struct RieBoundReport {
  double bound = 0.0;
  double max_deviation = 0.0;
  double violation_rate = 0.0;  // fraction of trials with deviation >= bound
  std::vector<RieTrialRecord> records;
};

namespace detail {

inline Labels random_labels(int N, int n, std::mt19937_64& rng) {
  Labels l;
  l.n = n;
  l.assignments.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    l.assignments[static_cast<std::size_t>(i)] =
        1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
  return l;
}

}  // namespace detail

/// Monte-Carlo check of the deviation bound: random truth and prediction
/// labels (cluster counts drawn from {2..5}), observed pairs kept
/// independently with probability p. Trials whose draw observes no pair are
/// redrawn with a derived seed. Returns the per-trial records along with the
/// maximum deviation and the fraction of trials at or above the bound.
inline RieBoundReport validate_rie_bound(int N, double p, int trials, std::uint64_t seed) {
  if (N < 2) throw std::invalid_argument("validate_rie_bound: N must be >= 2");
  if (trials < 1) throw std::invalid_argument("validate_rie_bound: trials must be >= 1");
  RieBoundReport report;
  report.bound = rie_error_bound(p, N);
  report.records.reserve(static_cast<std::size_t>(trials));
  int violations = 0;
  for (int t = 0; t < trials; ++t) {
    auto rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    const int n_truth = 2 + static_cast<int>(rng() % 4);
    const int n_pred = 2 + static_cast<int>(rng() % 4);
    const Labels truth = detail::random_labels(N, n_truth, rng);
    const Labels pred = detail::random_labels(N, n_pred, rng);

    ConstraintSet omega = ConstraintSet::none(N);
    for (int attempt = 0; attempt < 1000 && omega.empty(); ++attempt)
      omega = sample_side_information_bernoulli(
          truth, p, mix_seed(seed, (static_cast<std::uint64_t>(t) << 16) | 0xA5u) + attempt);
    if (omega.empty())
      throw std::runtime_error("validate_rie_bound: could not draw a nonempty observation set; "
                               "p is too small for this N");

    RieTrialRecord rec;
    rec.trial = t;
    rec.mu = rand_index(pred, truth);
    rec.mu_hat = rand_index_estimator(pred, omega);
    rec.deviation = std::abs(rec.mu_hat - rec.mu);
    report.max_deviation = std::max(report.max_deviation, rec.deviation);
    if (rec.deviation >= report.bound) ++violations;
    report.records.push_back(rec);
  }
  report.violation_rate = static_cast<double>(violations) / static_cast<double>(trials);
  return report;
}

/// Summary indices for one clustering run; fields are present only when the
/// reference they need (ground truth, constraints) was supplied.
struct MetricsReport {
  std::optional<double> err;
  std::optional<double> rand_index_value;
  std::optional<double> rie;
  std::optional<double> bound;
  int n_constraints = 0;
};

inline MetricsReport compute_metrics(const Labels& pred, const Labels* truth,
                                     const ConstraintSet* cs) {
  MetricsReport r;
  if (truth != nullptr) {
    r.err = clustering_error(pred, *truth);
    r.rand_index_value = rand_index(pred, *truth);
  }
  if (cs != nullptr && !cs->empty()) {
    r.rie = rand_index_estimator(pred, *cs);
    r.n_constraints = cs->size();
    const int N = cs->population();
    const double p_eff = static_cast<double>(2 * cs->size()) /
                         (static_cast<double>(N) * static_cast<double>(N - 1));
    const double denom = p_eff * static_cast<double>(N) * static_cast<double>(N - 1) - 1.0;
    if (denom > 0.0) r.bound = 2.0 / denom;
  }
  return r;
}

}  // namespace cssc
