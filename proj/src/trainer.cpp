#include "mtlbal/trainer.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <utility>

#include "mtlbal/errors.hpp"

namespace mtlbal {

TransformKind transform_for(Method m) noexcept {
  return (m == Method::si_mtl || m == Method::lw) ? TransformKind::log
                                                  : TransformKind::identity;
}

bool method_uses_ema(Method m) noexcept {
  return m == Method::si_g || m == Method::si_mtl;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::ew: return "ew";
    case Method::lw: return "lw";
    case Method::rlw: return "rlw";
    case Method::gls: return "gls";
    case Method::pcgrad: return "pcgrad";
    case Method::si_g: return "si_g";
    case Method::si_mtl: return "si_mtl";
  }
  return "?";
}

void validate(const TrainConfig& config) {
  if (!(config.lr > 0.0)) throw ConfigError("train.lr", "must be > 0");
  if (config.steps == 0) throw ConfigError("train.steps", "must be >= 1");
  if (config.batch_size == 0) {
    throw ConfigError("train.batch_size", "must be >= 1");
  }
  if (!(config.init_scale > 0.0)) {
    throw ConfigError("train.init_scale", "must be > 0");
  }
  if (config.beta.kind == BetaKind::constant) {
    if (config.beta.c < 0.0 || config.beta.c >= 1.0) {
      throw ConfigError("train.beta.c", "constant schedule needs c in [0, 1)");
    }
  } else if (!(config.beta.c > 0.0)) {
    throw ConfigError("train.beta.c", "inv_sqrt schedule needs c > 0");
  }
}

namespace {

[[noreturn]] void rethrow_as_divergence(const std::exception& e,
                                        std::size_t step,
                                        std::optional<std::size_t> task) {
  std::string where = "step " + std::to_string(step);
  if (task) where += ", task " + std::to_string(*task);
  throw DivergenceError("diverged at " + where + ": " + e.what(), step, task);
}

}  // namespace

RunTrace train(const TrainConfig& config, const TaskSet& tasks,
               const std::optional<ModelParams>& initial,
               const StepObserver& observer) {
  validate(config);
  const auto t_start = std::chrono::steady_clock::now();

  const std::size_t t_count = tasks.task_count();
  const TransformKind transform = transform_for(config.method);
  const bool with_ema = method_uses_ema(config.method);

  std::mt19937_64 rng(config.seed);
  ModelParams params =
      initial ? *initial : tasks.init_params(config.init_scale, rng);

  std::optional<BalancerState> ema_state;
  if (with_ema) {
    ema_state.emplace(BalancerKind::si_g, t_count, tasks.shared_dim(),
                      config.beta);
  }

  RunTrace trace;
  trace.config = config;
  trace.steps.reserve(config.steps);

  std::vector<double> batch_loss(t_count);
  std::vector<RealVector> raw_grad(t_count), transformed_grad(t_count),
      specific_grad(t_count);

  for (std::size_t k = 0; k < config.steps; ++k) {
    const double eff_lr =
        (config.lr_halve_at && k >= *config.lr_halve_at) ? 0.5 * config.lr
                                                         : config.lr;

    // All per-task quantities are evaluated at the step-k parameters;
    // updates are applied only after every task has been processed.
    for (std::size_t t = 0; t < t_count; ++t) {
      try {
        const Batch batch = tasks.sample_batch(t, config.batch_size, rng);
        batch_loss[t] = tasks.loss(t, params, batch);
        raw_grad[t] = tasks.grad_shared(t, params, batch);
        transformed_grad[t] =
            transform_grad(transform, batch_loss[t], raw_grad[t]);
        specific_grad[t] = transform_grad(
            transform, batch_loss[t], tasks.grad_task_specific(t, params, batch));
      } catch (const DomainError& e) {
        rethrow_as_divergence(e, k, t);
      } catch (const EvaluationError& e) {
        rethrow_as_divergence(e, k, t);
      }
    }

    StepRecord rec;
    rec.step = k;
    rec.task_loss = batch_loss;
    rec.effective_lr = eff_lr;
    rec.grad_norm.resize(t_count);

    RealVector aggregated;
    try {
      if (with_ema) {
        const std::vector<RealVector>& ema = ema_state->ema_update(transformed_grad);
        for (std::size_t t = 0; t < t_count; ++t) {
          rec.grad_norm[t] = norm2(ema[t]);
        }
        double alpha = 0.0;
        aggregated = si_g_aggregate(ema, config.alpha, &alpha);
        rec.alpha = alpha;
      } else {
        for (std::size_t t = 0; t < t_count; ++t) {
          rec.grad_norm[t] = norm2(transformed_grad[t]);
        }
        switch (config.method) {
          case Method::ew:
          case Method::lw:
            aggregated = ew_aggregate(transformed_grad,
                                      std::vector<double>(t_count, 1.0));
            break;
          case Method::rlw:
            aggregated =
                ew_aggregate(transformed_grad, rlw_weights(rng, t_count));
            break;
          case Method::gls:
            aggregated = gls_combined_gradient(batch_loss, raw_grad);
            break;
          case Method::pcgrad:
            aggregated = pcgrad_aggregate(transformed_grad, rng);
            break;
          default:
            throw DomainError("train: unhandled method");
        }
      }
      rec.agg_grad_norm = norm2(aggregated);

      if (observer) {
        observer(StepDebug{k, batch_loss, raw_grad, transformed_grad,
                           with_ema ? &ema_state->ema() : nullptr});
      }

      axpy_inplace(-eff_lr, aggregated, params.shared);
      for (std::size_t t = 0; t < t_count; ++t) {
        if (!specific_grad[t].empty()) {
          axpy_inplace(-eff_lr, specific_grad[t], params.task_specific[t]);
        }
      }
    } catch (const DomainError& e) {
      rethrow_as_divergence(e, k, std::nullopt);
    } catch (const EvaluationError& e) {
      rethrow_as_divergence(e, k, e.task());
    }

    trace.steps.push_back(std::move(rec));
  }

  trace.final_params = params;
  trace.final_full_loss.resize(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    try {
      trace.final_full_loss[t] = tasks.loss(t, params, tasks.full_batch(t));
    } catch (const EvaluationError& e) {
      rethrow_as_divergence(e, config.steps, t);
    }
  }
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return trace;
}

std::vector<RunTrace> run_many(const TrainConfig& config, const TaskSet& tasks,
                               const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw DomainError("run_many: seed list must be nonempty");
  std::vector<RunTrace> traces;
  traces.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    TrainConfig c = config;
    c.seed = seed;
    try {
      traces.push_back(train(c, tasks));
    } catch (const DivergenceError& e) {
      throw DivergenceError("seed " + std::to_string(seed) + ": " + e.what(),
                            e.step(), e.task());
    }
  }
  return traces;
}

}  // namespace mtlbal
