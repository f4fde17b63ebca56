#pragma once

#include <string>
#include <vector>

namespace mtlbal {

struct MetricValue {
  std::string name;
  double value = 0.0;
  bool higher_is_better = true;
};

struct TaskMetrics {
  std::string task_name;
  std::vector<MetricValue> metrics;
};

/// Named metrics grouped by task; the reference (single-task) table and a
/// method table being compared must have identical structure.
struct MetricTable {
  std::vector<TaskMetrics> tasks;
};

struct DeltaPResult {
  std::vector<double> per_task;  // percent
  double overall = 0.0;          // percent; mean of per_task
};

// Average signed relative change of the method's metrics against the
// reference, in percent. A lower-is-better metric counts improvement as
// positive. Throws on structure mismatch or a zero reference value.
double delta_p_task(const TaskMetrics& reference, const TaskMetrics& method);

DeltaPResult delta_p(const MetricTable& reference, const MetricTable& method);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1) estimator; 0 for a single value
};

MeanStd summarize_runs(const std::vector<double>& values);

}  // namespace mtlbal
