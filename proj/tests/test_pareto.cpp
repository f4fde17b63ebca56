#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mtlbal/errors.hpp"
#include "mtlbal/pareto.hpp"

using namespace mtlbal;

namespace {

ObjectivePoint pt(std::size_t idx, std::vector<double> losses) {
  return ObjectivePoint{std::move(losses), idx};
}

// Test-side oracle: literal definition check, written independently of
// the library path (flags array instead of set construction).
std::set<std::size_t> naive_front(const std::vector<ObjectivePoint>& points) {
  std::set<std::size_t> front;
  for (const ObjectivePoint& candidate : points) {
    bool is_dominated = false;
    for (const ObjectivePoint& other : points) {
      bool all_le = true, any_lt = false;
      for (std::size_t t = 0; t < candidate.losses.size(); ++t) {
        if (other.losses[t] > candidate.losses[t]) all_le = false;
        if (other.losses[t] < candidate.losses[t]) any_lt = true;
      }
      if (all_le && any_lt) {
        is_dominated = true;
        break;
      }
    }
    if (!is_dominated) front.insert(candidate.candidate_index);
  }
  return front;
}

std::vector<ObjectivePoint> random_cloud(std::mt19937_64& rng,
                                         std::size_t t_count, std::size_t n) {
  std::uniform_real_distribution<double> loss(0.1, 10.0);
  std::vector<ObjectivePoint> cloud;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> losses(t_count);
    for (double& v : losses) v = loss(rng);
    cloud.push_back(pt(i, std::move(losses)));
  }
  return cloud;
}

}  // namespace

TEST_CASE("dominance definition") {
  CHECK(dominates(pt(0, {1.0, 2.0}), pt(1, {2.0, 2.0})));
  CHECK(!dominates(pt(0, {1.0, 2.0}), pt(1, {2.0, 1.0})));
  CHECK(!dominates(pt(0, {2.0, 1.0}), pt(1, {1.0, 2.0})));
  CHECK(!dominates(pt(0, {1.0, 2.0}), pt(1, {1.0, 2.0})));
  CHECK_THROWS_AS(dominates(pt(0, {1.0}), pt(1, {1.0, 2.0})), DimensionError);
}

TEST_CASE("dominance is antisymmetric") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> loss(0.0, 3.0);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> a(3), b(3);
    for (std::size_t i = 0; i < 3; ++i) {
      a[i] = loss(rng);
      b[i] = loss(rng);
    }
    const ObjectivePoint pa = pt(0, a), pb = pt(1, b);
    if (dominates(pa, pb)) CHECK(!dominates(pb, pa));
  }
}

TEST_CASE("pareto_front on small sets") {
  const std::vector<ObjectivePoint> pts{
      pt(0, {1.0, 2.0}), pt(1, {2.0, 1.0}), pt(2, {2.0, 2.0})};
  CHECK(pareto_front(pts) == std::set<std::size_t>{0, 1});
  CHECK(pareto_front({pt(0, {5.0})}) == std::set<std::size_t>{0});
  CHECK_THROWS_AS(pareto_front({}), DomainError);
}

TEST_CASE("duplicates of a non-dominated vector are all kept") {
  const std::vector<ObjectivePoint> pts{
      pt(0, {1.0, 2.0}), pt(1, {1.0, 2.0}), pt(2, {3.0, 3.0})};
  CHECK(pareto_front(pts) == std::set<std::size_t>{0, 1});
}

TEST_CASE("1-D quadratic grid has the segment between minimizers as front") {
  std::vector<ObjectivePoint> points;
  for (std::size_t i = 0; i <= 400; ++i) {
    const double theta = (static_cast<double>(i) - 200.0) / 100.0;
    points.push_back(pt(i, {(theta - 1.0) * (theta - 1.0) + 0.1,
                            (theta + 1.0) * (theta + 1.0) + 0.1}));
  }
  std::set<std::size_t> expected;
  for (std::size_t i = 100; i <= 300; ++i) expected.insert(i);
  CHECK(pareto_front(points) == expected);
  CHECK(pareto_front(points) == naive_front(points));
  CHECK(check_log_front_invariance(points));
}

TEST_CASE("front matches the naive definition check on random clouds") {
  std::mt19937_64 rng(555);
  for (int rep = 0; rep < 60; ++rep) {
    const auto cloud = random_cloud(rng, 2 + rep % 4, 5 + rep * 2 % 120);
    CHECK(pareto_front(cloud) == naive_front(cloud));
  }
}

TEST_CASE("log preserves the front") {
  SUBCASE("single point") {
    CHECK(check_log_front_invariance({pt(0, {0.5, 2.0})}));
  }
  SUBCASE("2-D three-task grid") {
    const double centers[3][2] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    std::vector<ObjectivePoint> points;
    std::size_t idx = 0;
    for (std::size_t ix = 0; ix < 20; ++ix) {
      for (std::size_t iy = 0; iy < 20; ++iy) {
        const double x = -2.0 + 4.0 * static_cast<double>(ix) / 19.0;
        const double y = -2.0 + 4.0 * static_cast<double>(iy) / 19.0;
        std::vector<double> losses;
        for (const auto& c : centers) {
          losses.push_back((x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]) +
                           0.1);
        }
        points.push_back(pt(idx++, std::move(losses)));
      }
    }
    CHECK(check_log_front_invariance(points));
  }
  SUBCASE("100 random tie-free clouds") {
    std::mt19937_64 rng(20240902);
    const std::size_t t_choices[3] = {2, 3, 5};
    for (int rep = 0; rep < 100; ++rep) {
      const auto cloud = random_cloud(rng, t_choices[rep % 3], 10 + rep);
      CHECK(check_log_front_invariance(cloud));
    }
  }
  SUBCASE("rejects nonpositive losses") {
    CHECK_THROWS_AS(check_log_front_invariance({pt(0, {0.0, 1.0})}),
                    DomainError);
  }
}

TEST_CASE("any strictly increasing map preserves the front") {
  std::mt19937_64 rng(31415);
  const auto maps = {
      +[](double v) { return std::sqrt(v); },
      +[](double v) { return 3.0 * v + 7.0; },
      +[](double v) { return v * v * v; },
  };
  for (int rep = 0; rep < 40; ++rep) {
    const auto cloud = random_cloud(rng, 2 + rep % 3, 20 + rep);
    const auto base = pareto_front(cloud);
    for (const auto& map : maps) {
      std::vector<ObjectivePoint> mapped = cloud;
      for (ObjectivePoint& p : mapped) {
        for (double& v : p.losses) v = map(v);
      }
      CHECK(pareto_front(mapped) == base);
    }
  }
}
