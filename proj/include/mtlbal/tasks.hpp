#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "mtlbal/vec_math.hpp"

namespace mtlbal {

/// Shared parameters plus one (possibly empty) task-specific vector per task.
struct ModelParams {
  RealVector shared;
  std::vector<RealVector> task_specific;

  bool operator==(const ModelParams&) const = default;
};

/// Mini-batch drawn from one task's dataset. `offset_term` is the
/// additive constant applied inside the mean-loss bracket; for sampled
/// quadratic batches it folds in the noise second-moment correction that
/// keeps the batch loss an unbiased estimate of the full-dataset loss.
struct Batch {
  std::size_t task_index = 0;
  std::size_t batch_size = 0;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::vector<double> inputs;   // row-major batch_size x input_dim
  std::vector<double> targets;  // row-major batch_size x output_dim
  double offset_term = 0.0;
};

/// Budget for single-task reference training: same plain-GD optimizer and
/// step count as joint runs.
struct StlBudget {
  std::size_t steps = 1000;
  double lr = 0.01;
  std::size_t batch_size = 16;
  double init_scale = 0.1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> lr_halve_at;
};

struct StlReferenceEntry {
  double loss = 0.0;
  std::optional<RealVector> optimal_shared;  // analytic cases only
};

enum class TaskKind { scaled_quadratic_pair, mlp_regression };

inline constexpr double kQuadraticNoiseStdDefault = 0.1;  // variance 0.01
inline constexpr double kMlpLossOffset = 1e-3;

/// Immutable multi-task problem suite. Two families:
///
///  - scaled_quadratic_pair: two tasks with full-dataset loss
///    s_t * (||theta - a_t||^2 + offset), no task-specific parameters.
///    Mini-batches perturb the center per sample with Gaussian noise.
///
///  - mlp_regression: T scalar-regression tasks driven by per-task random
///    teacher networks. Shared parameters are the first (tanh) layer,
///    task-specific parameters are the linear heads; loss is
///    s_t * (MSE + 1e-3).
class TaskSet {
 public:
  static TaskSet make_scaled_quadratic_pair(
      std::size_t dim, std::pair<RealVector, RealVector> centers,
      std::pair<double, double> scales, double offset,
      double noise_std = kQuadraticNoiseStdDefault);

  static TaskSet make_mlp_regression(std::size_t task_count,
                                     std::size_t input_dim, std::size_t hidden,
                                     std::size_t samples_per_task,
                                     std::vector<double> scales,
                                     std::uint64_t seed);

  TaskKind kind() const noexcept { return kind_; }
  std::size_t task_count() const noexcept { return scales_.size(); }
  std::size_t shared_dim() const noexcept { return shared_dim_; }
  std::size_t task_specific_dim(std::size_t t) const;
  double scale(std::size_t t) const;
  double offset() const noexcept { return offset_; }

  // Draws batch_size samples i.i.d. with replacement.
  Batch sample_batch(std::size_t t, std::size_t batch_size,
                     std::mt19937_64& rng) const;

  // The whole dataset as one batch; its loss is the full-dataset loss.
  Batch full_batch(std::size_t t) const;

  // Mean loss over the batch; strictly positive by construction.
  double loss(std::size_t t, const ModelParams& params, const Batch& batch) const;

  // Analytic gradients of the batch loss.
  RealVector grad_shared(std::size_t t, const ModelParams& params,
                         const Batch& batch) const;
  RealVector grad_task_specific(std::size_t t, const ModelParams& params,
                                const Batch& batch) const;

  // Analytic optimum for quadratics; single-task plain-GD training under
  // `budget` for MLP tasks. Deterministic given budget.seed.
  StlReferenceEntry stl_reference(std::size_t t, const StlBudget& budget) const;

  // Gaussian N(0, init_scale^2) parameters; draw order: shared, then each
  // task's specific vector in task order.
  ModelParams init_params(double init_scale, std::mt19937_64& rng) const;

 private:
  TaskSet() = default;

  void require_task(std::size_t t) const;
  void require_batch(std::size_t t, const ModelParams& params,
                     const Batch& batch) const;

  double mlp_forward(std::size_t t, const ModelParams& params,
                     const Batch& batch, std::vector<double>* residuals,
                     std::vector<double>* hidden_acts) const;

  TaskKind kind_ = TaskKind::scaled_quadratic_pair;
  std::vector<double> scales_;
  double offset_ = 0.0;
  std::size_t shared_dim_ = 0;

  // scaled_quadratic_pair
  std::vector<RealVector> centers_;
  std::size_t dim_ = 0;
  double noise_std_ = 0.0;

  // mlp_regression
  std::size_t input_dim_ = 0;
  std::size_t hidden_ = 0;
  std::size_t samples_per_task_ = 0;
  std::vector<std::vector<double>> data_inputs_;   // per task, row-major
  std::vector<std::vector<double>> data_targets_;  // per task, one col
};

}  // namespace mtlbal
