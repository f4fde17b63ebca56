#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mtlbal/errors.hpp"
#include "mtlbal/transforms.hpp"

using namespace mtlbal;

TEST_CASE("transform_loss basics") {
  CHECK(transform_loss(TransformKind::log, 1.0) == 0.0);
  CHECK(transform_loss(TransformKind::log, std::exp(1.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(transform_loss(TransformKind::identity, 3.7) == 3.7);
}

TEST_CASE("transform_loss rejects nonpositive losses under log") {
  CHECK_THROWS_AS(transform_loss(TransformKind::log, 0.0), DomainError);
  CHECK_THROWS_AS(transform_loss(TransformKind::log, -1.0), DomainError);
}

TEST_CASE("log transform preserves loss ordering") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> loss(1e-6, 1e6);
  for (int rep = 0; rep < 500; ++rep) {
    double a = loss(rng), b = loss(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(transform_loss(TransformKind::log, a) <
          transform_loss(TransformKind::log, b));
  }
}

TEST_CASE("transform_grad chain rule") {
  const RealVector g{4.0, 6.0};
  const RealVector expected{2.0, 3.0};
  CHECK(transform_grad(TransformKind::log, 2.0, g) == expected);
  CHECK(transform_grad(TransformKind::identity, 2.0, g) == g);
}

TEST_CASE("log-gradient is invariant to common loss/gradient rescaling") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> entry(-5.0, 5.0);
  std::uniform_real_distribution<double> loss(1e-3, 1e3);
  std::uniform_real_distribution<double> log_c(-3.0, 3.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rep % 8;
    std::vector<double> e(n);
    for (double& v : e) v = entry(rng);
    const RealVector g(e);
    const double ell = loss(rng);
    const double c = std::pow(10.0, log_c(rng));

    RealVector cg(n);
    for (std::size_t i = 0; i < n; ++i) cg[i] = c * g[i];
    const RealVector base = transform_grad(TransformKind::log, ell, g);
    const RealVector scaled = transform_grad(TransformKind::log, c * ell, cg);
    for (std::size_t i = 0; i < n; ++i) {
      if (base[i] == 0.0) {
        CHECK(std::fabs(scaled[i]) <= 1e-300);
      } else {
        CHECK(std::fabs(scaled[i] - base[i]) / std::fabs(base[i]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("inner minimization recovers the log") {
  SUBCASE("x = 1") {
    const InnerMinResult r = imtl_l_inner_min(1.0);
    CHECK(std::fabs(r.s_star) <= 1e-6);
    CHECK(std::fabs(r.value) <= 1e-8);
  }
  SUBCASE("x = e") {
    const InnerMinResult r = imtl_l_inner_min(std::exp(1.0));
    CHECK(r.s_star == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("x = 0.5") {
    const InnerMinResult r = imtl_l_inner_min(0.5);
    CHECK(std::fabs(r.value - std::log(0.5)) <= 1e-8);
  }
  SUBCASE("sweep") {
    const double xs[] = {1e-2, 1e-1, 1.0, 2.0, std::exp(1.0), 10.0, 1e2};
    for (double x : xs) {
      const InnerMinResult r = imtl_l_inner_min(x);
      CHECK(std::fabs(r.value - std::log(x)) <= 1e-8);
      CHECK(std::fabs(r.s_star + std::log(x)) <= 1e-6);
    }
  }
  SUBCASE("domain") {
    CHECK_THROWS_AS(imtl_l_inner_min(0.0), DomainError);
    CHECK_THROWS_AS(imtl_l_inner_min(-3.0), DomainError);
  }
}

TEST_CASE("geometric-mean gradient") {
  SUBCASE("single task returns its gradient") {
    const RealVector g{2.5, -1.0};
    const RealVector out = gls_combined_gradient({3.0}, {g});
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(out[i] == doctest::Approx(g[i]).epsilon(1e-14));
    }
  }
  SUBCASE("hand-evaluated two-task case") {
    const RealVector out = gls_combined_gradient(
        {1.0, 4.0}, {RealVector{1.0, 0.0}, RealVector{0.0, 1.0}});
    CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("degree-1 homogeneity in the losses") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> loss(0.1, 10.0);
    std::uniform_real_distribution<double> entry(-2.0, 2.0);
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t t_count = 2 + rep % 3;
      const std::size_t n = 1 + rep % 4;
      std::vector<double> losses(t_count);
      std::vector<RealVector> grads;
      for (std::size_t t = 0; t < t_count; ++t) {
        losses[t] = loss(rng);
        std::vector<double> e(n);
        for (double& v : e) v = entry(rng);
        grads.emplace_back(e);
      }
      const double c = loss(rng);
      std::vector<double> scaled_losses(losses);
      for (double& v : scaled_losses) v *= c;

      const RealVector base = gls_combined_gradient(losses, grads);
      const RealVector scaled = gls_combined_gradient(scaled_losses, grads);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(scaled[i] == doctest::Approx(base[i]).epsilon(1e-10));
      }
    }
  }
  SUBCASE("direction equals sum of g_t / ell_t") {
    const std::vector<double> losses{0.5, 2.0, 3.0};
    const std::vector<RealVector> grads{RealVector{1.0, 2.0},
                                        RealVector{-0.5, 1.0},
                                        RealVector{0.25, -2.0}};
    const RealVector out = gls_combined_gradient(losses, grads);
    RealVector weighted(2);
    for (std::size_t t = 0; t < losses.size(); ++t) {
      for (std::size_t i = 0; i < 2; ++i) {
        weighted[i] += grads[t][i] / losses[t];
      }
    }
    const double nw = norm2(weighted), no = norm2(out);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::fabs(out[i] / no - weighted[i] / nw) <= 1e-12);
    }
  }
  SUBCASE("rejects nonpositive losses") {
    CHECK_THROWS_AS(
        gls_combined_gradient({1.0, 0.0},
                              {RealVector{1.0}, RealVector{1.0}}),
        DomainError);
  }
}
