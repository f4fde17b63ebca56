#include "mtlbal/pareto.hpp"

#include <cmath>
#include <string>

#include "mtlbal/errors.hpp"

namespace mtlbal {

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  if (a.losses.size() != b.losses.size()) {
    throw DimensionError("dominates: objective length mismatch");
  }
  bool strictly_less_somewhere = false;
  for (std::size_t t = 0; t < a.losses.size(); ++t) {
    if (a.losses[t] > b.losses[t]) return false;
    if (a.losses[t] < b.losses[t]) strictly_less_somewhere = true;
  }
  return strictly_less_somewhere;
}

std::set<std::size_t> pareto_front(const std::vector<ObjectivePoint>& points) {
  if (points.empty()) throw DomainError("pareto_front: empty point set");
  std::set<std::size_t> front;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      if (j != i && dominates(points[j], points[i])) dominated = true;
    }
    if (!dominated) front.insert(points[i].candidate_index);
  }
  return front;
}

bool check_log_front_invariance(const std::vector<ObjectivePoint>& points) {
  std::vector<ObjectivePoint> logged;
  logged.reserve(points.size());
  for (const ObjectivePoint& p : points) {
    ObjectivePoint q;
    q.candidate_index = p.candidate_index;
    q.losses.reserve(p.losses.size());
    for (double ell : p.losses) {
      if (!(ell > 0.0)) {
        throw DomainError(
            "check_log_front_invariance: nonpositive loss at candidate " +
            std::to_string(p.candidate_index));
      }
      q.losses.push_back(std::log(ell));
    }
    logged.push_back(std::move(q));
  }
  return pareto_front(points) == pareto_front(logged);
}

}  // namespace mtlbal
