#pragma once

#include <cstddef>
#include <set>
#include <vector>

namespace mtlbal {

/// One candidate's loss vector over T tasks.
struct ObjectivePoint {
  std::vector<double> losses;
  std::size_t candidate_index = 0;
};

// True iff a.losses <= b.losses elementwise and the vectors differ.
// Exact floating-point comparisons: tolerances would manufacture ties.
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b);

// Indices of points dominated by no other point. Duplicates of a
// non-dominated vector are all included. Plain O(n^2) enumeration.
std::set<std::size_t> pareto_front(const std::vector<ObjectivePoint>& points);

// True iff the front of the raw losses and the front of the
// elementwise-log losses are the same index set. Requires positive losses.
bool check_log_front_invariance(const std::vector<ObjectivePoint>& points);

}  // namespace mtlbal
