#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cssc {

/// Cluster assignment of N points: 1-based cluster ids in {1..n}.
struct Labels {
  std::vector<int> assignments;
  int n = 0;

  Labels() = default;
  Labels(std::vector<int> a, int clusters) : assignments(std::move(a)), n(clusters) { validate(); }

  int size() const { return static_cast<int>(assignments.size()); }
  int operator[](int i) const { return assignments[static_cast<std::size_t>(i)]; }

  void validate() const {
    if (n < 1) throw std::invalid_argument("Labels: cluster count must be >= 1, got " + std::to_string(n));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      const int a = assignments[i];
      if (a < 1 || a > n)
        throw std::invalid_argument("Labels: assignment " + std::to_string(a) + " at position " +
                                    std::to_string(i) + " outside {1.." + std::to_string(n) + "}");
    }
  }
};

/// Relabels clusters by order of first occurrence, so that two labelings of
/// the same partition compare equal.
inline Labels canonicalize(const Labels& labels) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(labels.assignments.size());
  int next = 1;
  for (std::size_t i = 0; i < labels.assignments.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(labels.assignments[i], next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return Labels{std::move(out), std::max(labels.n, next - 1)};
}

/// True when two labelings induce the same partition (cluster ids may differ).
inline bool same_partition(const Labels& a, const Labels& b) {
  if (a.assignments.size() != b.assignments.size()) return false;
  return canonicalize(a).assignments == canonicalize(b).assignments;
}

}  // namespace cssc
