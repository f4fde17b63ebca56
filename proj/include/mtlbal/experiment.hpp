#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mtlbal/config.hpp"
#include "mtlbal/trainer.hpp"

namespace mtlbal {

struct RunOptions {
  std::optional<std::string> out_override;
  std::optional<std::uint64_t> seed_override;  // replaces the seed list
  bool quiet = false;
  // Cap on parallel sweep cells; unset falls back to MTL_BALANCE_THREADS,
  // then to hardware concurrency.
  std::optional<std::size_t> threads;
};

// Serializes doubles with 17 significant digits so the text round-trips.
std::string format_double(double v);

// Writes one trace in the fixed schema
//   step,task,loss,ema_grad_norm,alpha,agg_grad_norm
// with one row per (step, task) carrying (loss, ema_grad_norm) and one
// aggregate row per step (task = -1) carrying (alpha, agg_grad_norm).
void write_trace_csv(std::ostream& out, const RunTrace& trace);

// Executes every sweep cell x seed, writing one trace CSV per seed and a
// summary JSON per cell (final losses plus relative improvement over the
// single-task references, mean and stddev across seeds). Returns 0 on
// success, 3 if any run diverged (partial outputs preserved and an error
// manifest written). Throws ConfigError for unusable configs/paths.
int run_experiment(const ExperimentConfig& config, const RunOptions& options);

}  // namespace mtlbal
