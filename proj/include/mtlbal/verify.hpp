#pragma once

#include <string>
#include <vector>

#include "mtlbal/metrics.hpp"

namespace mtlbal {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Pareto-front invariance under the log transform: brute-force fronts of
// raw and log losses on fixed quadratic grids and random point clouds.
std::vector<CheckResult> verify_prop1();

// The minimum of exp(s)*x - s - 1 equals ln(x) (minimizer -ln(x)) over a
// fixed sweep of x values.
std::vector<CheckResult> verify_prop2();

// Recomputes the published overall-improvement numbers from the metric
// fixtures under `fixtures_dir` and compares against the printed values.
// Throws ConfigError if a fixture file is missing or malformed.
std::vector<CheckResult> verify_tables(const std::string& fixtures_dir);

// Parsed fixture: a reference table, per-method tables, and each
// method's printed overall value.
struct TableFixture {
  std::string dataset;
  MetricTable reference;
  std::vector<std::pair<std::string, MetricTable>> methods;
  std::vector<double> printed_delta_p;  // parallel to `methods`
};

TableFixture load_table_fixture(const std::string& path);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace mtlbal
