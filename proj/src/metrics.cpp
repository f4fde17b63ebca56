#include "mtlbal/metrics.hpp"

#include <cmath>

#include "mtlbal/errors.hpp"

namespace mtlbal {

namespace {

const MetricValue& find_metric(const TaskMetrics& task, const MetricValue& ref) {
  const MetricValue* found = nullptr;
  for (const MetricValue& m : task.metrics) {
    if (m.name == ref.name) {
      if (found) {
        throw DimensionError("delta_p_task: duplicate metric '" + m.name +
                             "' in task '" + task.task_name + "'");
      }
      found = &m;
    }
  }
  if (!found) {
    throw DimensionError("delta_p_task: metric '" + ref.name +
                         "' missing from task '" + task.task_name + "'");
  }
  if (found->higher_is_better != ref.higher_is_better) {
    throw DimensionError("delta_p_task: metric '" + ref.name +
                         "' disagrees on direction");
  }
  return *found;
}

}  // namespace

double delta_p_task(const TaskMetrics& reference, const TaskMetrics& method) {
  if (reference.metrics.empty()) {
    throw DimensionError("delta_p_task: task '" + reference.task_name +
                         "' has no metrics");
  }
  if (reference.metrics.size() != method.metrics.size()) {
    throw DimensionError("delta_p_task: metric count mismatch for task '" +
                         reference.task_name + "'");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < reference.metrics.size(); ++i) {
    for (std::size_t j = i + 1; j < reference.metrics.size(); ++j) {
      if (reference.metrics[i].name == reference.metrics[j].name) {
        throw DimensionError("delta_p_task: duplicate metric '" +
                             reference.metrics[i].name +
                             "' in reference task '" + reference.task_name +
                             "'");
      }
    }
  }
  for (const MetricValue& ref : reference.metrics) {
    const MetricValue& m = find_metric(method, ref);
    if (ref.value == 0.0) {
      throw DomainError("delta_p_task: reference value for metric '" +
                        ref.name + "' is zero");
    }
    const double sign = ref.higher_is_better ? 1.0 : -1.0;
    sum += sign * (m.value - ref.value) / ref.value;
  }
  return 100.0 * sum / static_cast<double>(reference.metrics.size());
}

DeltaPResult delta_p(const MetricTable& reference, const MetricTable& method) {
  if (reference.tasks.empty()) {
    throw DimensionError("delta_p: reference table has no tasks");
  }
  if (reference.tasks.size() != method.tasks.size()) {
    throw DimensionError("delta_p: task count mismatch");
  }
  DeltaPResult result;
  result.per_task.reserve(reference.tasks.size());
  double sum = 0.0;
  for (const TaskMetrics& ref_task : reference.tasks) {
    const TaskMetrics* m_task = nullptr;
    for (const TaskMetrics& cand : method.tasks) {
      if (cand.task_name == ref_task.task_name) {
        if (m_task) {
          throw DimensionError("delta_p: duplicate task '" + cand.task_name + "'");
        }
        m_task = &cand;
      }
    }
    if (!m_task) {
      throw DimensionError("delta_p: task '" + ref_task.task_name +
                           "' missing from method table");
    }
    const double d = delta_p_task(ref_task, *m_task);
    result.per_task.push_back(d);
    sum += d;
  }
  result.overall = sum / static_cast<double>(reference.tasks.size());
  return result;
}

MeanStd summarize_runs(const std::vector<double>& values) {
  if (values.empty()) throw DomainError("summarize_runs: empty input");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double stddev = 0.0;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return MeanStd{mean, stddev};
}

}  // namespace mtlbal
