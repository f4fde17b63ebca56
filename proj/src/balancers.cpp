#include "mtlbal/balancers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mtlbal/errors.hpp"

namespace mtlbal {

double BetaSchedule::value_at(std::size_t step) const {
  double beta = c;
  if (kind == BetaKind::inv_sqrt) {
    beta = c / std::sqrt(static_cast<double>(step) + 1.0);
  }
  return std::clamp(beta, 0.0, std::nextafter(1.0, 0.0));
}

BalancerState::BalancerState(BalancerKind kind, std::size_t task_count,
                             std::size_t shared_dim, BetaSchedule beta)
    : kind_(kind), beta_(beta) {
  ema_.assign(task_count, RealVector(shared_dim));
}

const std::vector<RealVector>& BalancerState::ema_update(
    const std::vector<RealVector>& g_list) {
  if (g_list.size() != ema_.size()) {
    throw DimensionError("ema_update: task count mismatch");
  }
  const double beta = beta_.value_at(step_);
  for (std::size_t t = 0; t < g_list.size(); ++t) {
    RealVector& hat = ema_[t];
    const RealVector& g = g_list[t];
    if (g.size() != hat.size()) {
      throw DimensionError("ema_update: gradient length mismatch at task " +
                           std::to_string(t));
    }
    for (std::size_t i = 0; i < hat.size(); ++i) {
      hat[i] = beta * hat[i] + (1.0 - beta) * g[i];
    }
    hat.check_finite("ema_update");
  }
  ++step_;
  return ema_;
}

double alpha_value(const std::vector<double>& norms, AlphaStrategy strategy,
                   std::size_t task_count) {
  if (norms.empty()) throw DimensionError("alpha_value: empty norm list");
  switch (strategy) {
    case AlphaStrategy::max:
      return *std::max_element(norms.begin(), norms.end());
    case AlphaStrategy::min:
      return *std::min_element(norms.begin(), norms.end());
    case AlphaStrategy::mean:
      return std::accumulate(norms.begin(), norms.end(), 0.0) /
             static_cast<double>(norms.size());
    case AlphaStrategy::median: {
      std::vector<double> sorted = norms;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t n = sorted.size();
      if (n % 2 == 1) return sorted[n / 2];
      return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }
    case AlphaStrategy::constant_inv_t:
      return 1.0 / static_cast<double>(task_count);
  }
  throw DomainError("alpha_value: unknown strategy");
}

RealVector si_g_aggregate(const std::vector<RealVector>& ema_grads,
                          AlphaStrategy strategy, double* alpha_out) {
  if (ema_grads.empty()) throw DimensionError("si_g_aggregate: empty input");
  const std::size_t dim = ema_grads[0].size();

  RealVector unit_sum(dim);
  std::vector<double> contributing_norms;
  contributing_norms.reserve(ema_grads.size());
  for (const RealVector& g : ema_grads) {
    if (g.size() != dim) {
      throw DimensionError("si_g_aggregate: gradient length mismatch");
    }
    const double n = norm2(g);
    if (n < kGradNormEpsilon) continue;
    contributing_norms.push_back(n);
    axpy_inplace(1.0 / n, g, unit_sum);
  }

  if (contributing_norms.empty()) {
    if (alpha_out) *alpha_out = 0.0;
    return RealVector(dim);
  }
  const double alpha =
      alpha_value(contributing_norms, strategy, ema_grads.size());
  if (alpha_out) *alpha_out = alpha;
  for (double& v : unit_sum) v *= alpha;
  unit_sum.check_finite("si_g_aggregate");
  return unit_sum;
}

RealVector ew_aggregate(const std::vector<RealVector>& g_list,
                        const std::vector<double>& weights) {
  if (g_list.empty() || g_list.size() != weights.size()) {
    throw DimensionError("ew_aggregate: need matching nonempty grads/weights");
  }
  RealVector out(g_list[0].size());
  for (std::size_t t = 0; t < g_list.size(); ++t) {
    axpy_inplace(weights[t], g_list[t], out);
  }
  return out;
}

std::vector<double> rlw_weights(std::mt19937_64& rng, std::size_t task_count) {
  if (task_count == 0) throw DimensionError("rlw_weights: task_count must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> z(task_count);
  for (double& v : z) v = gauss(rng);
  const double zmax = *std::max_element(z.begin(), z.end());
  double denom = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    denom += v;
  }
  for (double& v : z) v /= denom;
  return z;
}

RealVector pcgrad_aggregate(const std::vector<RealVector>& g_list,
                            std::mt19937_64& rng) {
  if (g_list.empty()) throw DimensionError("pcgrad_aggregate: empty input");
  const std::size_t t_count = g_list.size();
  const std::size_t dim = g_list[0].size();
  for (const RealVector& g : g_list) {
    if (g.size() != dim) {
      throw DimensionError("pcgrad_aggregate: gradient length mismatch");
    }
  }

  std::vector<double> sq_norms(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    sq_norms[t] = dot(g_list[t], g_list[t]);
  }

  RealVector out(dim);
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < t_count; ++i) {
    others.clear();
    for (std::size_t j = 0; j < t_count; ++j) {
      if (j != i) others.push_back(j);
    }
    std::shuffle(others.begin(), others.end(), rng);

    RealVector gi = g_list[i];
    for (std::size_t j : others) {
      if (sq_norms[j] == 0.0) continue;
      const double d = dot(gi, g_list[j]);
      if (d < 0.0) axpy_inplace(-d / sq_norms[j], g_list[j], gi);
    }
    axpy_inplace(1.0, gi, out);
  }
  return out;
}

}  // namespace mtlbal
