#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "mtlbal/vec_math.hpp"

namespace mtlbal {

// Per-task EMA gradients with norm below this threshold contribute zero
// direction and are excluded from the alpha statistic.
inline constexpr double kGradNormEpsilon = 1e-12;

enum class BetaKind { constant, inv_sqrt };

/// EMA forgetting-rate schedule. `constant`: beta_k = c. `inv_sqrt`:
/// beta_k = c / sqrt(k+1) with k the 0-based step, clipped into [0, 1).
struct BetaSchedule {
  BetaKind kind = BetaKind::constant;
  double c = 0.9;

  double value_at(std::size_t step) const;

  bool operator==(const BetaSchedule&) const = default;
};

/// Scale factor strategy for the normalized-gradient sum: a statistic of
/// the per-task EMA gradient norms, or the constant 1/T.
enum class AlphaStrategy { max, min, mean, median, constant_inv_t };

enum class BalancerKind { si_g, ew, rlw, pcgrad, gls };

/// EMA buffers for one training run. Owned and mutated by exactly one
/// run; all-zero before the first update.
class BalancerState {
 public:
  BalancerState(BalancerKind kind, std::size_t task_count,
                std::size_t shared_dim, BetaSchedule beta);

  BalancerKind kind() const noexcept { return kind_; }
  std::size_t step() const noexcept { return step_; }
  const std::vector<RealVector>& ema() const noexcept { return ema_; }
  const BetaSchedule& beta_schedule() const noexcept { return beta_; }

  // hat_g_k = beta_k * hat_g_{k-1} + (1 - beta_k) * g_k; the first call
  // (k = 0) reduces to (1 - beta_0) * g_0 — no bias correction.
  // Stores the result and increments the step counter.
  const std::vector<RealVector>& ema_update(
      const std::vector<RealVector>& g_list);

 private:
  BalancerKind kind_;
  BetaSchedule beta_;
  std::vector<RealVector> ema_;
  std::size_t step_ = 0;
};

// max / min / mean / median of the norms, or constant 1/T. Median of an
// even count is the midpoint of the two central order statistics.
double alpha_value(const std::vector<double>& norms, AlphaStrategy strategy,
                   std::size_t task_count);

// Normalizes each EMA gradient to unit norm, sums them, and rescales by
// the alpha statistic of the contributing norms. Tasks with norm below
// kGradNormEpsilon contribute nothing; if all are below, returns zero.
// `alpha_out`, when given, receives the alpha actually applied.
RealVector si_g_aggregate(const std::vector<RealVector>& ema_grads,
                          AlphaStrategy strategy, double* alpha_out = nullptr);

// sum_t w_t * g_t. Equal weighting passes w_t = 1.
RealVector ew_aggregate(const std::vector<RealVector>& g_list,
                        const std::vector<double>& weights);

// softmax of a standard Gaussian draw; resampled every call. Weights are
// strictly positive and sum to 1.
std::vector<double> rlw_weights(std::mt19937_64& rng, std::size_t task_count);

// For each task, projects its gradient off the conflicting directions of
// the other tasks (visited in random order, projections against the
// original gradients), then sums the projected gradients.
RealVector pcgrad_aggregate(const std::vector<RealVector>& g_list,
                            std::mt19937_64& rng);

}  // namespace mtlbal
