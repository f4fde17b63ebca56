#include "mtlbal/tasks.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mtlbal/errors.hpp"

namespace mtlbal {

namespace {

void fill_gaussian(std::vector<double>& out, double stddev,
                   std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : out) v = stddev * gauss(rng);
}

RealVector gaussian_vector(std::size_t n, double stddev, std::mt19937_64& rng) {
  std::vector<double> e(n);
  fill_gaussian(e, stddev, rng);
  return RealVector(std::move(e));
}

}  // namespace

TaskSet TaskSet::make_scaled_quadratic_pair(
    std::size_t dim, std::pair<RealVector, RealVector> centers,
    std::pair<double, double> scales, double offset, double noise_std) {
  if (dim == 0) throw DomainError("scaled_quadratic_pair: dim must be >= 1");
  if (centers.first.size() != dim || centers.second.size() != dim) {
    throw DimensionError("scaled_quadratic_pair: center length != dim");
  }
  if (!(scales.first > 0.0) || !(scales.second > 0.0)) {
    throw DomainError("scaled_quadratic_pair: scales must be > 0");
  }
  if (!(offset > 0.0)) {
    throw DomainError("scaled_quadratic_pair: offset must be > 0");
  }
  if (noise_std < 0.0) {
    throw DomainError("scaled_quadratic_pair: noise_std must be >= 0");
  }
  TaskSet ts;
  ts.kind_ = TaskKind::scaled_quadratic_pair;
  ts.scales_ = {scales.first, scales.second};
  ts.offset_ = offset;
  ts.shared_dim_ = dim;
  ts.dim_ = dim;
  ts.noise_std_ = noise_std;
  ts.centers_ = {std::move(centers.first), std::move(centers.second)};
  return ts;
}

TaskSet TaskSet::make_mlp_regression(std::size_t task_count,
                                     std::size_t input_dim, std::size_t hidden,
                                     std::size_t samples_per_task,
                                     std::vector<double> scales,
                                     std::uint64_t seed) {
  if (task_count == 0 || input_dim == 0 || hidden == 0 ||
      samples_per_task == 0) {
    throw DomainError("mlp_regression: all dimensions must be >= 1");
  }
  if (scales.size() != task_count) {
    throw DimensionError("mlp_regression: scales length != task count");
  }
  for (double s : scales) {
    if (!(s > 0.0)) throw DomainError("mlp_regression: scales must be > 0");
  }

  TaskSet ts;
  ts.kind_ = TaskKind::mlp_regression;
  ts.scales_ = std::move(scales);
  ts.offset_ = kMlpLossOffset;
  ts.input_dim_ = input_dim;
  ts.hidden_ = hidden;
  ts.samples_per_task_ = samples_per_task;
  ts.shared_dim_ = hidden * (input_dim + 1);

  // Per-task teacher network and dataset, all from one master stream.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double w1_std = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double w2_std = 1.0 / std::sqrt(static_cast<double>(hidden));

  for (std::size_t t = 0; t < task_count; ++t) {
    std::vector<double> w1(hidden * input_dim), b1(hidden), w2(hidden);
    for (double& v : w1) v = w1_std * gauss(rng);
    for (double& v : b1) v = 0.1 * gauss(rng);
    for (double& v : w2) v = w2_std * gauss(rng);
    const double b2 = 0.1 * gauss(rng);

    std::vector<double> inputs(samples_per_task * input_dim);
    std::vector<double> targets(samples_per_task);
    for (double& v : inputs) v = gauss(rng);
    for (std::size_t j = 0; j < samples_per_task; ++j) {
      double pred = b2;
      for (std::size_t h = 0; h < hidden; ++h) {
        double z = b1[h];
        for (std::size_t i = 0; i < input_dim; ++i) {
          z += w1[h * input_dim + i] * inputs[j * input_dim + i];
        }
        pred += w2[h] * std::tanh(z);
      }
      targets[j] = pred;
    }

    // Standardize targets per task; the scale multipliers s_t are then the
    // only source of loss-scale disparity.
    double mean = 0.0;
    for (double y : targets) mean += y;
    mean /= static_cast<double>(samples_per_task);
    double var = 0.0;
    for (double y : targets) var += (y - mean) * (y - mean);
    var /= static_cast<double>(samples_per_task);
    const double stddev = std::sqrt(var);
    for (double& y : targets) {
      y = stddev > 1e-12 ? (y - mean) / stddev : y - mean;
    }

    ts.data_inputs_.push_back(std::move(inputs));
    ts.data_targets_.push_back(std::move(targets));
  }
  return ts;
}

void TaskSet::require_task(std::size_t t) const {
  if (t >= task_count()) {
    throw DomainError("task index " + std::to_string(t) + " out of range");
  }
}

void TaskSet::require_batch(std::size_t t, const ModelParams& params,
                            const Batch& batch) const {
  require_task(t);
  if (batch.task_index != t) {
    throw DomainError("batch belongs to task " +
                      std::to_string(batch.task_index) + ", not " +
                      std::to_string(t));
  }
  if (batch.batch_size == 0) throw DomainError("empty batch");
  if (params.shared.size() != shared_dim_) {
    throw DimensionError("shared parameter length mismatch");
  }
  if (params.task_specific.size() != task_count() ||
      params.task_specific[t].size() != task_specific_dim(t)) {
    throw DimensionError("task-specific parameter shape mismatch");
  }
}

std::size_t TaskSet::task_specific_dim(std::size_t t) const {
  require_task(t);
  return kind_ == TaskKind::scaled_quadratic_pair ? 0 : hidden_ + 1;
}

double TaskSet::scale(std::size_t t) const {
  require_task(t);
  return scales_[t];
}

Batch TaskSet::sample_batch(std::size_t t, std::size_t batch_size,
                            std::mt19937_64& rng) const {
  require_task(t);
  if (batch_size == 0) throw DomainError("sample_batch: batch_size must be >= 1");
  Batch b;
  b.task_index = t;
  b.batch_size = batch_size;

  if (kind_ == TaskKind::scaled_quadratic_pair) {
    b.input_dim = 0;
    b.output_dim = dim_;
    b.targets.resize(batch_size * dim_);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const RealVector& center = centers_[t];
    for (std::size_t j = 0; j < batch_size; ++j) {
      for (std::size_t i = 0; i < dim_; ++i) {
        b.targets[j * dim_ + i] = center[i] + noise_std_ * gauss(rng);
      }
    }
    // Unbiasedness: E||theta - c||^2 exceeds the noise-free value by
    // dim * noise_var, so that constant moves into the offset term.
    b.offset_term =
        offset_ - static_cast<double>(dim_) * noise_std_ * noise_std_;
    return b;
  }

  b.input_dim = input_dim_;
  b.output_dim = 1;
  b.inputs.resize(batch_size * input_dim_);
  b.targets.resize(batch_size);
  std::uniform_int_distribution<std::size_t> pick(0, samples_per_task_ - 1);
  for (std::size_t j = 0; j < batch_size; ++j) {
    const std::size_t idx = pick(rng);
    for (std::size_t i = 0; i < input_dim_; ++i) {
      b.inputs[j * input_dim_ + i] = data_inputs_[t][idx * input_dim_ + i];
    }
    b.targets[j] = data_targets_[t][idx];
  }
  b.offset_term = kMlpLossOffset;
  return b;
}

Batch TaskSet::full_batch(std::size_t t) const {
  require_task(t);
  Batch b;
  b.task_index = t;
  if (kind_ == TaskKind::scaled_quadratic_pair) {
    b.batch_size = 1;
    b.input_dim = 0;
    b.output_dim = dim_;
    b.targets = centers_[t].entries();
    b.offset_term = offset_;
    return b;
  }
  b.batch_size = samples_per_task_;
  b.input_dim = input_dim_;
  b.output_dim = 1;
  b.inputs = data_inputs_[t];
  b.targets = data_targets_[t];
  b.offset_term = kMlpLossOffset;
  return b;
}

double TaskSet::mlp_forward(std::size_t t, const ModelParams& params,
                            const Batch& batch, std::vector<double>* residuals,
                            std::vector<double>* hidden_acts) const {
  const std::vector<double>& theta = params.shared.entries();
  const std::vector<double>& psi = params.task_specific[t].entries();
  const std::size_t bias_base = hidden_ * input_dim_;
  double sq_sum = 0.0;
  if (residuals) residuals->resize(batch.batch_size);
  if (hidden_acts) hidden_acts->resize(batch.batch_size * hidden_);
  for (std::size_t j = 0; j < batch.batch_size; ++j) {
    double pred = psi[hidden_];
    for (std::size_t h = 0; h < hidden_; ++h) {
      double z = theta[bias_base + h];
      for (std::size_t i = 0; i < input_dim_; ++i) {
        z += theta[h * input_dim_ + i] * batch.inputs[j * input_dim_ + i];
      }
      const double act = std::tanh(z);
      if (hidden_acts) (*hidden_acts)[j * hidden_ + h] = act;
      pred += psi[h] * act;
    }
    const double r = pred - batch.targets[j];
    if (residuals) (*residuals)[j] = r;
    sq_sum += r * r;
  }
  return sq_sum / static_cast<double>(batch.batch_size);
}

double TaskSet::loss(std::size_t t, const ModelParams& params,
                     const Batch& batch) const {
  require_batch(t, params, batch);
  double value = 0.0;
  if (kind_ == TaskKind::scaled_quadratic_pair) {
    const std::vector<double>& theta = params.shared.entries();
    double sq_sum = 0.0;
    for (std::size_t j = 0; j < batch.batch_size; ++j) {
      for (std::size_t i = 0; i < dim_; ++i) {
        const double d = theta[i] - batch.targets[j * dim_ + i];
        sq_sum += d * d;
      }
    }
    value = scales_[t] *
            (sq_sum / static_cast<double>(batch.batch_size) + batch.offset_term);
  } else {
    value = scales_[t] * (mlp_forward(t, params, batch, nullptr, nullptr) +
                          batch.offset_term);
  }
  if (!std::isfinite(value)) {
    throw EvaluationError("loss: non-finite value for task " + std::to_string(t),
                          t);
  }
  return value;
}

RealVector TaskSet::grad_shared(std::size_t t, const ModelParams& params,
                                const Batch& batch) const {
  require_batch(t, params, batch);
  RealVector g(shared_dim_);

  if (kind_ == TaskKind::scaled_quadratic_pair) {
    const std::vector<double>& theta = params.shared.entries();
    const double coeff = 2.0 * scales_[t] / static_cast<double>(batch.batch_size);
    for (std::size_t j = 0; j < batch.batch_size; ++j) {
      for (std::size_t i = 0; i < dim_; ++i) {
        g[i] += coeff * (theta[i] - batch.targets[j * dim_ + i]);
      }
    }
  } else {
    std::vector<double> residuals, acts;
    mlp_forward(t, params, batch, &residuals, &acts);
    const std::vector<double>& psi = params.task_specific[t].entries();
    const std::size_t bias_base = hidden_ * input_dim_;
    const double coeff = 2.0 * scales_[t] / static_cast<double>(batch.batch_size);
    for (std::size_t j = 0; j < batch.batch_size; ++j) {
      const double rj = coeff * residuals[j];
      for (std::size_t h = 0; h < hidden_; ++h) {
        const double a = acts[j * hidden_ + h];
        const double dz = rj * psi[h] * (1.0 - a * a);
        for (std::size_t i = 0; i < input_dim_; ++i) {
          g[h * input_dim_ + i] += dz * batch.inputs[j * input_dim_ + i];
        }
        g[bias_base + h] += dz;
      }
    }
  }

  try {
    g.check_finite("grad_shared");
  } catch (const EvaluationError&) {
    throw EvaluationError("grad_shared: non-finite gradient for task " +
                          std::to_string(t), t);
  }
  return g;
}

RealVector TaskSet::grad_task_specific(std::size_t t, const ModelParams& params,
                                       const Batch& batch) const {
  require_batch(t, params, batch);
  if (kind_ == TaskKind::scaled_quadratic_pair) return RealVector(0);

  RealVector g(hidden_ + 1);
  std::vector<double> residuals, acts;
  mlp_forward(t, params, batch, &residuals, &acts);
  const double coeff = 2.0 * scales_[t] / static_cast<double>(batch.batch_size);
  for (std::size_t j = 0; j < batch.batch_size; ++j) {
    const double rj = coeff * residuals[j];
    for (std::size_t h = 0; h < hidden_; ++h) {
      g[h] += rj * acts[j * hidden_ + h];
    }
    g[hidden_] += rj;
  }
  try {
    g.check_finite("grad_task_specific");
  } catch (const EvaluationError&) {
    throw EvaluationError("grad_task_specific: non-finite gradient for task " +
                          std::to_string(t), t);
  }
  return g;
}

StlReferenceEntry TaskSet::stl_reference(std::size_t t,
                                         const StlBudget& budget) const {
  require_task(t);
  if (kind_ == TaskKind::scaled_quadratic_pair) {
    return StlReferenceEntry{scales_[t] * offset_, centers_[t]};
  }

  // Single-task plain GD on the raw loss: same optimizer family and step
  // budget as joint runs. Draw order: shared init, head init, then one
  // batch per step.
  std::mt19937_64 rng(budget.seed);
  ModelParams params;
  params.shared = gaussian_vector(shared_dim_, budget.init_scale, rng);
  params.task_specific.assign(task_count(), RealVector(0));
  for (std::size_t u = 0; u < task_count(); ++u) {
    params.task_specific[u] = RealVector(task_specific_dim(u));
  }
  params.task_specific[t] =
      gaussian_vector(task_specific_dim(t), budget.init_scale, rng);

  for (std::size_t k = 0; k < budget.steps; ++k) {
    const double lr = (budget.lr_halve_at && k >= *budget.lr_halve_at)
                          ? 0.5 * budget.lr
                          : budget.lr;
    const Batch b = sample_batch(t, budget.batch_size, rng);
    const RealVector g_shared = grad_shared(t, params, b);
    const RealVector g_specific = grad_task_specific(t, params, b);
    axpy_inplace(-lr, g_shared, params.shared);
    axpy_inplace(-lr, g_specific, params.task_specific[t]);
  }
  return StlReferenceEntry{loss(t, params, full_batch(t)), std::nullopt};
}

ModelParams TaskSet::init_params(double init_scale, std::mt19937_64& rng) const {
  if (init_scale < 0.0) throw DomainError("init_params: init_scale must be >= 0");
  ModelParams p;
  p.shared = gaussian_vector(shared_dim_, init_scale, rng);
  p.task_specific.reserve(task_count());
  for (std::size_t t = 0; t < task_count(); ++t) {
    p.task_specific.push_back(
        gaussian_vector(task_specific_dim(t), init_scale, rng));
  }
  return p;
}

}  // namespace mtlbal
