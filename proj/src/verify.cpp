#include "mtlbal/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mtlbal/errors.hpp"
#include "mtlbal/pareto.hpp"
#include "mtlbal/transforms.hpp"

namespace mtlbal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

// Printed-value reproduction tolerances, in absolute percent. The pinned
// row is reproducible up to metric rounding; the remaining rows carry the
// additional slack of per-seed averaging in the published pipeline.
constexpr double kPinnedRowTolerance = 0.05;
constexpr double kSeedAveragedRowTolerance = 0.10;

}  // namespace

std::vector<CheckResult> verify_prop1() {
  std::vector<CheckResult> results;

  // (a) 1-D grid over two quadratics: the front is exactly the segment
  // between the two minimizers.
  {
    std::vector<ObjectivePoint> points;
    for (std::size_t i = 0; i <= 400; ++i) {
      const double theta = (static_cast<double>(i) - 200.0) / 100.0;
      points.push_back(ObjectivePoint{
          {(theta - 1.0) * (theta - 1.0) + 0.1,
           (theta + 1.0) * (theta + 1.0) + 0.1},
          i});
    }
    std::set<std::size_t> expected;
    for (std::size_t i = 100; i <= 300; ++i) expected.insert(i);
    const bool front_exact = pareto_front(points) == expected;
    results.push_back({"prop1/1d-grid-front-exact", front_exact,
                       "front must be exactly the 201 points between the "
                       "minimizers"});
    results.push_back({"prop1/1d-grid-log-invariance",
                       check_log_front_invariance(points),
                       "raw and log fronts agree on 401 grid points"});
  }

  // (b) 20x20 2-D grid, three quadratic objectives.
  {
    const double centers[3][2] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    std::vector<ObjectivePoint> points;
    std::size_t idx = 0;
    for (std::size_t ix = 0; ix < 20; ++ix) {
      for (std::size_t iy = 0; iy < 20; ++iy) {
        const double x = -2.0 + 4.0 * static_cast<double>(ix) / 19.0;
        const double y = -2.0 + 4.0 * static_cast<double>(iy) / 19.0;
        ObjectivePoint p;
        p.candidate_index = idx++;
        for (const auto& c : centers) {
          p.losses.push_back((x - c[0]) * (x - c[0]) +
                             (y - c[1]) * (y - c[1]) + 0.1);
        }
        points.push_back(std::move(p));
      }
    }
    results.push_back({"prop1/2d-grid-log-invariance",
                       check_log_front_invariance(points),
                       "raw and log fronts agree on a 20x20 3-task grid"});
  }

  // (c) random tie-free clouds, plus other strictly increasing maps —
  // order preservation is the whole mechanism.
  {
    std::mt19937_64 rng(20240901);
    std::uniform_real_distribution<double> loss_dist(0.1, 10.0);
    const std::size_t t_choices[3] = {2, 3, 5};
    std::size_t log_ok = 0, sqrt_ok = 0, affine_ok = 0;
    const std::size_t n_clouds = 100;
    for (std::size_t c = 0; c < n_clouds; ++c) {
      const std::size_t t_count = t_choices[c % 3];
      const std::size_t n = 20 + (c * 7) % 181;  // <= 200
      std::vector<ObjectivePoint> cloud;
      for (std::size_t i = 0; i < n; ++i) {
        ObjectivePoint p;
        p.candidate_index = i;
        for (std::size_t t = 0; t < t_count; ++t) {
          p.losses.push_back(loss_dist(rng));
        }
        cloud.push_back(std::move(p));
      }
      if (check_log_front_invariance(cloud)) ++log_ok;

      const auto mapped_front_equal = [&](auto&& map) {
        std::vector<ObjectivePoint> mapped = cloud;
        for (ObjectivePoint& p : mapped) {
          for (double& v : p.losses) v = map(v);
        }
        return pareto_front(mapped) == pareto_front(cloud);
      };
      if (mapped_front_equal([](double v) { return std::sqrt(v); })) ++sqrt_ok;
      if (mapped_front_equal([](double v) { return 3.0 * v + 7.0; })) ++affine_ok;
    }
    results.push_back({"prop1/random-clouds-log-invariance",
                       log_ok == n_clouds,
                       fmt("%g/100 clouds preserved", double(log_ok))});
    results.push_back({"prop1/random-clouds-sqrt-invariance",
                       sqrt_ok == n_clouds,
                       fmt("%g/100 clouds preserved", double(sqrt_ok))});
    results.push_back({"prop1/random-clouds-affine-invariance",
                       affine_ok == n_clouds,
                       fmt("%g/100 clouds preserved", double(affine_ok))});
  }

  return results;
}

std::vector<CheckResult> verify_prop2() {
  std::vector<CheckResult> results;
  const double xs[] = {1e-2, 1e-1, 0.5, 1.0, 2.0, std::exp(1.0), 10.0, 1e2};
  for (double x : xs) {
    const InnerMinResult r = imtl_l_inner_min(x);
    const double value_err = std::fabs(r.value - std::log(x));
    const double arg_err = std::fabs(r.s_star + std::log(x));
    const bool pass = value_err <= 1e-8 && arg_err <= 1e-6;
    results.push_back(
        {fmt("prop2/x=%g", x), pass,
         fmt("|min-ln x|=%.3g |argmin+ln x|=%.3g", value_err, arg_err)});
  }
  return results;
}

TableFixture load_table_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open fixture file: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "fixture " + path + ": " + e.what());
  }

  try {
    TableFixture fixture;
    fixture.dataset = root.at("dataset").get<std::string>();

    // Task/metric layout shared by the reference row and every method row.
    struct MetricDecl {
      std::string name;
      bool higher_is_better;
    };
    std::vector<std::pair<std::string, std::vector<MetricDecl>>> layout;
    for (const json& task : root.at("tasks")) {
      std::vector<MetricDecl> metrics;
      for (const json& m : task.at("metrics")) {
        metrics.push_back(MetricDecl{m.at("name").get<std::string>(),
                                     m.at("higher_is_better").get<bool>()});
      }
      layout.emplace_back(task.at("name").get<std::string>(),
                          std::move(metrics));
    }

    const auto read_table = [&](const json& values) {
      MetricTable table;
      for (const auto& [task_name, metrics] : layout) {
        TaskMetrics tm;
        tm.task_name = task_name;
        const json& task_values = values.at(task_name);
        for (const MetricDecl& decl : metrics) {
          tm.metrics.push_back(MetricValue{
              decl.name, task_values.at(decl.name).get<double>(),
              decl.higher_is_better});
        }
        table.tasks.push_back(std::move(tm));
      }
      return table;
    };

    fixture.reference = read_table(root.at("stl"));
    for (const json& method : root.at("methods")) {
      fixture.methods.emplace_back(method.at("name").get<std::string>(),
                                   read_table(method.at("values")));
      fixture.printed_delta_p.push_back(
          method.at("printed_delta_p").get<double>());
    }
    return fixture;
  } catch (const json::exception& e) {
    throw ConfigError("", "fixture " + path + ": " + e.what());
  }
}

std::vector<CheckResult> verify_tables(const std::string& fixtures_dir) {
  if (!fs::is_directory(fixtures_dir)) {
    throw ConfigError("", "fixtures directory not found: " + fixtures_dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(fixtures_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (files.empty()) {
    throw ConfigError("", "no fixture files under " + fixtures_dir);
  }
  std::sort(files.begin(), files.end());

  std::vector<CheckResult> results;
  for (const fs::path& file : files) {
    const TableFixture fixture = load_table_fixture(file.string());
    for (std::size_t i = 0; i < fixture.methods.size(); ++i) {
      const auto& [method, table] = fixture.methods[i];
      const double printed = fixture.printed_delta_p[i];
      const double recomputed = delta_p(fixture.reference, table).overall;
      const double residual = std::fabs(recomputed - printed);
      const double tol =
          method == "EW" ? kPinnedRowTolerance : kSeedAveragedRowTolerance;
      results.push_back(
          {"tables/" + fixture.dataset + "/" + method, residual <= tol,
           fmt("recomputed %+.4f printed %+.4f |resid| %.4f", recomputed,
               printed, residual) +
               fmt(" tol %.2f", tol)});
    }
  }
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace mtlbal
