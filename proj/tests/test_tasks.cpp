#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mtlbal/errors.hpp"
#include "mtlbal/tasks.hpp"

using namespace mtlbal;

namespace {

TaskSet unit_pair(double s1 = 1.0, double s2 = 1.0, double offset = 0.1,
                  double noise_std = kQuadraticNoiseStdDefault) {
  return TaskSet::make_scaled_quadratic_pair(
      1, {RealVector{-1.0}, RealVector{1.0}}, {s1, s2}, offset, noise_std);
}

ModelParams quad_params(const TaskSet& ts, std::vector<double> shared) {
  ModelParams p;
  p.shared = RealVector(std::move(shared));
  p.task_specific.assign(ts.task_count(), RealVector(0));
  return p;
}

double rel_grad_error(const RealVector& analytic, const RealVector& numeric) {
  const double denom = std::max({norm2(analytic), norm2(numeric), 1e-12});
  return norm2(scaled_add(-1.0, analytic, numeric)) / denom;
}

}  // namespace

TEST_CASE("quadratic pair construction and references") {
  SUBCASE("unit scales") {
    const TaskSet ts = unit_pair();
    const StlBudget budget;
    const StlReferenceEntry r0 = ts.stl_reference(0, budget);
    const StlReferenceEntry r1 = ts.stl_reference(1, budget);
    CHECK(r0.loss == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(r1.loss == doctest::Approx(0.1).epsilon(1e-15));
    REQUIRE(r0.optimal_shared.has_value());
    CHECK((*r0.optimal_shared)[0] == -1.0);
    CHECK((*r1.optimal_shared)[0] == 1.0);
  }
  SUBCASE("scale multiplies the reference") {
    const TaskSet ts = unit_pair(1.0, 1000.0);
    CHECK(ts.stl_reference(0, StlBudget{}).loss == doctest::Approx(0.1));
    CHECK(ts.stl_reference(1, StlBudget{}).loss == doctest::Approx(100.0));
  }
  SUBCASE("coincident centers share the minimizer") {
    const TaskSet ts = TaskSet::make_scaled_quadratic_pair(
        2, {RealVector{0.0, 0.0}, RealVector{0.0, 0.0}}, {1.0, 2.0}, 0.1);
    const auto r0 = ts.stl_reference(0, StlBudget{});
    const auto r1 = ts.stl_reference(1, StlBudget{});
    CHECK(*r0.optimal_shared == *r1.optimal_shared);
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(unit_pair(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(unit_pair(1.0, -2.0), DomainError);
    CHECK_THROWS_AS(unit_pair(1.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(TaskSet::make_scaled_quadratic_pair(
                        2, {RealVector{0.0}, RealVector{0.0, 0.0}}, {1.0, 1.0},
                        0.1),
                    DimensionError);
  }
}

TEST_CASE("quadratic losses on the full batch") {
  const TaskSet ts = unit_pair();
  SUBCASE("at the center the loss is s * offset") {
    const ModelParams p = quad_params(ts, {-1.0});
    CHECK(ts.loss(0, p, ts.full_batch(0)) == doctest::Approx(0.1).epsilon(1e-15));
  }
  SUBCASE("at the midpoint both tasks see 1.1") {
    const ModelParams p = quad_params(ts, {0.0});
    CHECK(ts.loss(0, p, ts.full_batch(0)) == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(ts.loss(1, p, ts.full_batch(1)) == doctest::Approx(1.1).epsilon(1e-15));
  }
  SUBCASE("loss is exactly linear in the scale") {
    const TaskSet scaled = unit_pair(1000.0, 1.0);
    const ModelParams p = quad_params(ts, {0.3});
    const ModelParams ps = quad_params(scaled, {0.3});
    const double base = ts.loss(0, p, ts.full_batch(0));
    const double big = scaled.loss(0, ps, scaled.full_batch(0));
    CHECK(big == 1000.0 * base);
  }
}

TEST_CASE("quadratic gradients") {
  const TaskSet ts = unit_pair();
  SUBCASE("hand value at theta = 0") {
    const ModelParams p = quad_params(ts, {0.0});
    const RealVector g = ts.grad_shared(1, p, ts.full_batch(1));
    CHECK(g[0] == doctest::Approx(-2.0).epsilon(1e-15));
  }
  SUBCASE("stationary at the center") {
    const ModelParams p = quad_params(ts, {1.0});
    const RealVector g = ts.grad_shared(1, p, ts.full_batch(1));
    CHECK(g[0] == 0.0);
  }
  SUBCASE("task-specific gradient is empty") {
    const ModelParams p = quad_params(ts, {0.0});
    CHECK(ts.grad_task_specific(0, p, ts.full_batch(0)).empty());
  }
}

TEST_CASE("quadratic batch sampling") {
  const TaskSet ts = unit_pair();
  SUBCASE("deterministic given the seed") {
    std::mt19937_64 a(99), b(99);
    for (int rep = 0; rep < 5; ++rep) {
      const Batch ba = ts.sample_batch(0, 8, a);
      const Batch bb = ts.sample_batch(0, 8, b);
      CHECK(ba.targets == bb.targets);
      CHECK(ba.offset_term == bb.offset_term);
    }
  }
  SUBCASE("noise-free sampling reproduces the full batch") {
    const TaskSet clean = unit_pair(1.0, 1.0, 0.1, 0.0);
    std::mt19937_64 rng(1);
    const Batch b = clean.sample_batch(0, 4, rng);
    const ModelParams p = quad_params(clean, {0.25});
    CHECK(clean.loss(0, p, b) ==
          doctest::Approx(clean.loss(0, p, clean.full_batch(0))).epsilon(1e-15));
  }
  SUBCASE("batch losses are positive") {
    std::mt19937_64 rng(7);
    const ModelParams p = quad_params(ts, {0.4});
    for (int rep = 0; rep < 2000; ++rep) {
      CHECK(ts.loss(0, p, ts.sample_batch(0, 1 + rep % 8, rng)) > 0.0);
    }
  }
  SUBCASE("mean batch loss is unbiased for the full-dataset loss") {
    std::mt19937_64 rng(12345);
    const ModelParams p = quad_params(ts, {0.7});
    const double full = ts.loss(0, p, ts.full_batch(0));
    const int n = 10000;
    double sum = 0.0, sumsq = 0.0;
    for (int rep = 0; rep < n; ++rep) {
      const double ell = ts.loss(0, p, ts.sample_batch(0, 8, rng));
      sum += ell;
      sumsq += ell * ell;
    }
    const double mean = sum / n;
    const double var = (sumsq - n * mean * mean) / (n - 1);
    const double se = std::sqrt(var / n);
    CHECK(std::fabs(mean - full) <= 3.0 * se);
  }
}

TEST_CASE("batch/task mismatch is rejected") {
  const TaskSet ts = unit_pair();
  const ModelParams p = quad_params(ts, {0.0});
  CHECK_THROWS_AS(ts.loss(1, p, ts.full_batch(0)), DomainError);
}

TEST_CASE("mlp regression construction") {
  SUBCASE("deterministic datasets") {
    const TaskSet a = TaskSet::make_mlp_regression(2, 3, 5, 64, {1.0, 1.0}, 7);
    const TaskSet b = TaskSet::make_mlp_regression(2, 3, 5, 64, {1.0, 1.0}, 7);
    for (std::size_t t = 0; t < 2; ++t) {
      CHECK(a.full_batch(t).inputs == b.full_batch(t).inputs);
      CHECK(a.full_batch(t).targets == b.full_batch(t).targets);
    }
  }
  SUBCASE("different seeds give different data") {
    const TaskSet a = TaskSet::make_mlp_regression(2, 3, 5, 64, {1.0, 1.0}, 7);
    const TaskSet b = TaskSet::make_mlp_regression(2, 3, 5, 64, {1.0, 1.0}, 8);
    CHECK(a.full_batch(0).targets != b.full_batch(0).targets);
  }
  SUBCASE("scale disparity shows up in the initial losses") {
    const TaskSet ts =
        TaskSet::make_mlp_regression(2, 4, 8, 256, {1.0, 100.0}, 7);
    std::mt19937_64 rng(0);
    const ModelParams p = ts.init_params(0.1, rng);
    const double l0 = ts.loss(0, p, ts.full_batch(0));
    const double l1 = ts.loss(1, p, ts.full_batch(1));
    const double ratio = l1 / l0;
    CHECK(ratio >= 50.0);
    CHECK(ratio <= 200.0);
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(TaskSet::make_mlp_regression(2, 3, 5, 64, {1.0}, 7),
                    DimensionError);
    CHECK_THROWS_AS(TaskSet::make_mlp_regression(2, 3, 5, 64, {1.0, 0.0}, 7),
                    DomainError);
    CHECK_THROWS_AS(TaskSet::make_mlp_regression(0, 3, 5, 64, {}, 7),
                    DomainError);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng(314);

  SUBCASE("quadratic, sampled batches") {
    const TaskSet ts = unit_pair(2.0, 5.0, 0.3);
    for (int rep = 0; rep < 10; ++rep) {
      const std::size_t t = rep % 2;
      const Batch batch = ts.sample_batch(t, 4, rng);
      std::normal_distribution<double> gauss(0.0, 1.0);
      ModelParams p = quad_params(ts, {gauss(rng)});
      const RealVector analytic = ts.grad_shared(t, p, batch);
      const auto f = [&](const RealVector& theta) {
        ModelParams q = p;
        q.shared = theta;
        return ts.loss(t, q, batch);
      };
      const RealVector numeric = finite_diff_grad(f, p.shared, 1e-5);
      CHECK(rel_grad_error(analytic, numeric) <= 1e-4);
    }
  }

  SUBCASE("mlp, shared and task-specific") {
    const TaskSet ts = TaskSet::make_mlp_regression(2, 3, 4, 32, {1.0, 3.0}, 11);
    for (int rep = 0; rep < 10; ++rep) {
      const std::size_t t = rep % 2;
      const Batch batch = ts.sample_batch(t, 8, rng);
      ModelParams p = ts.init_params(0.5, rng);

      const RealVector g_shared = ts.grad_shared(t, p, batch);
      const auto f_shared = [&](const RealVector& theta) {
        ModelParams q = p;
        q.shared = theta;
        return ts.loss(t, q, batch);
      };
      CHECK(rel_grad_error(g_shared, finite_diff_grad(f_shared, p.shared, 1e-5)) <=
            1e-4);

      const RealVector g_specific = ts.grad_task_specific(t, p, batch);
      const auto f_specific = [&](const RealVector& psi) {
        ModelParams q = p;
        q.task_specific[t] = psi;
        return ts.loss(t, q, batch);
      };
      CHECK(rel_grad_error(g_specific,
                           finite_diff_grad(f_specific, p.task_specific[t],
                                            1e-5)) <= 1e-4);
    }
  }
}

TEST_CASE("mlp losses are positive") {
  const TaskSet ts = TaskSet::make_mlp_regression(2, 3, 4, 32, {1.0, 9.0}, 21);
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const ModelParams p = ts.init_params(1.0, rng);
    const std::size_t t = rep % 2;
    CHECK(ts.loss(t, p, ts.sample_batch(t, 4, rng)) > 0.0);
  }
}
