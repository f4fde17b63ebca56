#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mtlbal/balancers.hpp"
#include "mtlbal/tasks.hpp"
#include "mtlbal/transforms.hpp"

namespace mtlbal {

/// Update-combination method. `si_g` EMA-smooths raw task gradients and
/// rescales their unit-vector sum; `si_mtl` does the same on log-loss
/// gradients; `lw` is the plain sum of log-loss gradients; the rest work
/// on raw gradients.
enum class Method { ew, lw, rlw, gls, pcgrad, si_g, si_mtl };

// log for si_mtl and lw, identity otherwise.
TransformKind transform_for(Method m) noexcept;
bool method_uses_ema(Method m) noexcept;
const char* method_name(Method m);

struct TrainConfig {
  Method method = Method::ew;
  AlphaStrategy alpha = AlphaStrategy::max;
  BetaSchedule beta{};
  double lr = 0.01;
  std::optional<std::size_t> lr_halve_at;
  std::size_t steps = 100;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  double init_scale = 0.1;

  bool operator==(const TrainConfig&) const = default;
};

// Throws ConfigError on invalid fields.
void validate(const TrainConfig& config);

struct StepRecord {
  std::size_t step = 0;
  std::vector<double> task_loss;  // batch loss per task
  // Per-task gradient norm entering aggregation: EMA norm for si_g /
  // si_mtl, transformed-gradient norm otherwise.
  std::vector<double> grad_norm;
  std::optional<double> alpha;  // si_g / si_mtl only
  double agg_grad_norm = 0.0;
  double effective_lr = 0.0;
};

struct RunTrace {
  TrainConfig config;
  std::vector<StepRecord> steps;  // exactly config.steps records
  ModelParams final_params;
  std::vector<double> final_full_loss;  // full-dataset loss per task
  double wall_seconds = 0.0;
};

/// Debug view of one step, for instrumented tests. References are valid
/// only during the callback.
struct StepDebug {
  std::size_t step;
  const std::vector<double>& batch_loss;
  const std::vector<RealVector>& raw_grad;
  const std::vector<RealVector>& transformed_grad;
  const std::vector<RealVector>* ema_grad;  // null for methods without EMA
};
using StepObserver = std::function<void(const StepDebug&)>;

// One full training run. Deterministic given the seed; the RNG stream is
// consumed in a fixed order (init, then per step: one batch per task in
// task order, then any balancer randomness). `initial`, when given,
// replaces the seeded Gaussian parameter init. Throws DivergenceError
// with (step, task) on non-finite values or nonpositive losses under log.
RunTrace train(const TrainConfig& config, const TaskSet& tasks,
               const std::optional<ModelParams>& initial = std::nullopt,
               const StepObserver& observer = {});

// Independent runs, one per seed; result order matches `seeds`.
std::vector<RunTrace> run_many(const TrainConfig& config, const TaskSet& tasks,
                               const std::vector<std::uint64_t>& seeds);

}  // namespace mtlbal
