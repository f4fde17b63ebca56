#include "mtlbal/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "mtlbal/errors.hpp"
#include "mtlbal/metrics.hpp"

namespace mtlbal {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "step,task,loss,ema_grad_norm,alpha,agg_grad_norm\n";
  for (const StepRecord& rec : trace.steps) {
    for (std::size_t t = 0; t < rec.task_loss.size(); ++t) {
      out << rec.step << ',' << t << ',' << format_double(rec.task_loss[t])
          << ',' << format_double(rec.grad_norm[t]) << ",,\n";
    }
    out << rec.step << ",-1,,,";
    if (rec.alpha) out << format_double(*rec.alpha);
    out << ',' << format_double(rec.agg_grad_norm) << '\n';
  }
}

namespace {

struct Cell {
  std::size_t index = 0;
  TrainConfig train;
};

std::vector<Cell> enumerate_cells(const ExperimentConfig& config) {
  const std::vector<Method> methods = config.sweep.method.empty()
                                          ? std::vector<Method>{config.train.method}
                                          : config.sweep.method;
  const std::vector<AlphaStrategy> alphas =
      config.sweep.alpha.empty() ? std::vector<AlphaStrategy>{config.train.alpha}
                                 : config.sweep.alpha;
  const std::vector<BetaSchedule> betas =
      config.sweep.beta.empty() ? std::vector<BetaSchedule>{config.train.beta}
                                : config.sweep.beta;
  std::vector<Cell> cells;
  for (Method m : methods) {
    for (AlphaStrategy a : alphas) {
      for (const BetaSchedule& b : betas) {
        Cell cell;
        cell.index = cells.size();
        cell.train = config.train;
        cell.train.method = m;
        cell.train.alpha = a;
        cell.train.beta = b;
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

std::string cell_dir_name(const Cell& cell) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "cell_%03zu_%s_%s", cell.index,
                method_name(cell.train.method), alpha_name(cell.train.alpha));
  return buf;
}

std::size_t thread_cap(const RunOptions& options, std::size_t cell_count) {
  std::size_t cap = 0;
  if (options.threads) {
    cap = *options.threads;
  } else if (const char* env = std::getenv("MTL_BALANCE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) {
      throw ConfigError("MTL_BALANCE_THREADS",
                        "expected a positive integer, got '" + std::string(env) +
                            "'");
    }
    cap = v;
  } else {
    cap = std::thread::hardware_concurrency();
  }
  if (cap == 0) cap = 1;
  return std::min(cap, cell_count);
}

struct DivergenceRecord {
  std::size_t cell = 0;
  std::uint64_t seed = 0;
  std::size_t step = 0;
  std::optional<std::size_t> task;
  std::string message;
};

json run_cell(const ExperimentConfig& config, const Cell& cell,
              const TaskSet& tasks, const fs::path& dir,
              std::vector<DivergenceRecord>& failures) {
  const std::size_t t_count = tasks.task_count();

  StlBudget budget;
  budget.steps = cell.train.steps;
  budget.lr = cell.train.lr;
  budget.batch_size = cell.train.batch_size;
  budget.init_scale = cell.train.init_scale;
  budget.lr_halve_at = cell.train.lr_halve_at;

  json per_seed = json::array();
  std::vector<double> delta_values;
  std::vector<double> loss_sums(t_count, 0.0);
  std::size_t completed = 0;

  for (std::uint64_t seed : config.seeds) {
    TrainConfig train = cell.train;
    train.seed = seed;
    RunTrace trace;
    try {
      trace = mtlbal::train(train, tasks);

      // The single-task references train with the same budget; they can
      // diverge exactly like the joint run and are reported the same way.
      budget.seed = seed;
      MetricTable reference, method;
      json ref_losses = json::array();
      for (std::size_t t = 0; t < t_count; ++t) {
        const StlReferenceEntry ref = tasks.stl_reference(t, budget);
        const std::string name = "task" + std::to_string(t);
        reference.tasks.push_back(
            TaskMetrics{name, {MetricValue{"loss", ref.loss, false}}});
        method.tasks.push_back(TaskMetrics{
            name, {MetricValue{"loss", trace.final_full_loss[t], false}}});
        ref_losses.push_back(ref.loss);
      }
      const DeltaPResult dp = delta_p(reference, method);

      {
        const fs::path csv_path =
            dir / ("trace_seed" + std::to_string(seed) + ".csv");
        std::ofstream csv(csv_path, std::ios::binary);
        write_trace_csv(csv, trace);
        if (!csv) {
          throw std::runtime_error("failed to write " + csv_path.string());
        }
      }

      json entry;
      entry["seed"] = seed;
      entry["final_full_loss"] = trace.final_full_loss;
      entry["stl_reference_loss"] = ref_losses;
      entry["delta_p"] = dp.overall;
      entry["delta_p_per_task"] = dp.per_task;
      per_seed.push_back(entry);

      delta_values.push_back(dp.overall);
      for (std::size_t t = 0; t < t_count; ++t) {
        loss_sums[t] += trace.final_full_loss[t];
      }
      ++completed;
    } catch (const DivergenceError& e) {
      failures.push_back(
          DivergenceRecord{cell.index, seed, e.step(), e.task(), e.what()});
    } catch (const EvaluationError& e) {
      failures.push_back(
          DivergenceRecord{cell.index, seed, 0, e.task(), e.what()});
    }
  }

  json summary;
  summary["cell"] = {{"index", cell.index},
                     {"method", method_name(cell.train.method)},
                     {"alpha", alpha_name(cell.train.alpha)},
                     {"beta",
                      {{"kind", beta_kind_name(cell.train.beta.kind)},
                       {"c", cell.train.beta.c}}}};
  ExperimentConfig cell_config = config;
  cell_config.train = cell.train;
  cell_config.sweep = SweepAxes{};
  summary["config"] = json::parse(render_config(cell_config));
  summary["per_seed"] = per_seed;
  summary["completed_seeds"] = completed;
  if (!delta_values.empty()) {
    const MeanStd stats = summarize_runs(delta_values);
    summary["delta_p_mean"] = stats.mean;
    summary["delta_p_stddev"] = stats.stddev;
    json mean_losses = json::array();
    for (double s : loss_sums) {
      mean_losses.push_back(s / static_cast<double>(completed));
    }
    summary["final_loss_mean"] = mean_losses;
  }
  return summary;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentConfig cfg = config;
  if (options.out_override) cfg.out_dir = *options.out_override;
  if (options.seed_override) cfg.seeds = {*options.seed_override};
  if (cfg.seeds.empty()) throw ConfigError("seeds", "must be nonempty");
  validate(cfg.train);

  const TaskSet tasks = make_task_set(cfg.task);
  const std::vector<Cell> cells = enumerate_cells(cfg);
  const bool swept = !cfg.sweep.empty();

  const fs::path out_root(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(out_root, ec);
  if (ec) {
    throw ConfigError("out", "cannot create output directory '" +
                                 out_root.string() + "': " + ec.message());
  }

  std::vector<fs::path> cell_dirs(cells.size());
  for (const Cell& cell : cells) {
    cell_dirs[cell.index] = swept ? out_root / cell_dir_name(cell) : out_root;
    fs::create_directories(cell_dirs[cell.index]);
  }

  std::vector<DivergenceRecord> failures;
  std::mutex failures_mutex;
  std::atomic<std::size_t> next_cell{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next_cell.fetch_add(1);
      if (i >= cells.size()) return;
      std::vector<DivergenceRecord> local_failures;
      try {
        const json summary =
            run_cell(cfg, cells[i], tasks, cell_dirs[i], local_failures);
        std::ofstream out(cell_dirs[i] / "summary.json", std::ios::binary);
        out << summary.dump(2) << '\n';
      } catch (const std::exception& e) {
        // keep the pool alive; surface the cell failure in the manifest
        local_failures.push_back(
            DivergenceRecord{cells[i].index, 0, 0, std::nullopt, e.what()});
      }
      if (!local_failures.empty()) {
        std::lock_guard<std::mutex> lock(failures_mutex);
        failures.insert(failures.end(), local_failures.begin(),
                        local_failures.end());
      }
    }
  };

  const std::size_t n_threads = thread_cap(options, cells.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end(),
              [](const DivergenceRecord& a, const DivergenceRecord& b) {
                return std::tie(a.cell, a.seed) < std::tie(b.cell, b.seed);
              });
    json manifest = json::array();
    for (const DivergenceRecord& f : failures) {
      json e;
      e["cell"] = f.cell;
      e["seed"] = f.seed;
      e["step"] = f.step;
      if (f.task) e["task"] = *f.task;
      e["message"] = f.message;
      manifest.push_back(e);
    }
    std::ofstream out(out_root / "errors.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!options.quiet) {
      std::cerr << failures.size() << " run(s) diverged; see "
                << (out_root / "errors.json").string() << '\n';
    }
    return 3;
  }
  if (!options.quiet) {
    std::cerr << "wrote " << cells.size() << " cell(s) x " << cfg.seeds.size()
              << " seed(s) under " << out_root.string() << '\n';
  }
  return 0;
}

}  // namespace mtlbal
