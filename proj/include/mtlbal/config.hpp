#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtlbal/tasks.hpp"
#include "mtlbal/trainer.hpp"

namespace mtlbal {

/// Task-suite construction parameters, mirroring the TaskSet factories.
/// Parsing applies every default eagerly, so a parsed spec is fully
/// concrete and render/parse round-trips exactly.
struct TaskSpec {
  TaskKind kind = TaskKind::scaled_quadratic_pair;

  // scaled_quadratic_pair
  std::size_t dim = 1;
  std::vector<std::vector<double>> centers;  // exactly 2, each length dim
  double offset = 0.1;
  double noise_std = kQuadraticNoiseStdDefault;

  // mlp_regression
  std::size_t task_count = 2;
  std::size_t input_dim = 4;
  std::size_t hidden = 8;
  std::size_t samples_per_task = 256;
  std::uint64_t data_seed = 0;

  // both kinds; length 2 for quadratic, task_count for MLP
  std::vector<double> scales;

  bool operator==(const TaskSpec&) const = default;
};

TaskSet make_task_set(const TaskSpec& spec);

struct SweepAxes {
  std::vector<Method> method;
  std::vector<AlphaStrategy> alpha;
  std::vector<BetaSchedule> beta;

  bool empty() const noexcept {
    return method.empty() && alpha.empty() && beta.empty();
  }
  bool operator==(const SweepAxes&) const = default;
};

struct ExperimentConfig {
  TaskSpec task;
  TrainConfig train;
  std::vector<std::uint64_t> seeds = {0};
  std::string out_dir = "runs";
  SweepAxes sweep;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses the JSON experiment config. Unknown keys, type mismatches and
// constraint violations throw ConfigError carrying the dotted key path;
// syntax errors carry the parser's byte position.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Inverse of parse_config: parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& config);

// Enum <-> string helpers shared by config parsing and summaries.
Method parse_method(const std::string& s);
AlphaStrategy parse_alpha(const std::string& s);
BetaKind parse_beta_kind(const std::string& s);
const char* alpha_name(AlphaStrategy a);
const char* beta_kind_name(BetaKind k);
const char* task_kind_name(TaskKind k);
TaskKind parse_task_kind(const std::string& s);

}  // namespace mtlbal
