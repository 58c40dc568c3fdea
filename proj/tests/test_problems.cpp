#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "isqa/oracle.hpp"
#include "isqa/problems.hpp"

using namespace isqa;
using testing_util::vec;

TEST_CASE("prox_l1") {
  CHECK(prox_l1(vec({1.5}), 1.0)(0) == 0.5);
  CHECK(prox_l1(vec({-0.3}), 1.0)(0) == 0.0);
  const Vector v = vec({3.2, -7.1, 0.4});
  CHECK((prox_l1(v, 1e-12) - v).cwiseAbs().maxCoeff() <= 1e-11);
  CHECK_THROWS_AS(prox_l1(v, 0.0), UsageError);
  CHECK_THROWS_AS(prox_l1(v, -1.0), UsageError);
}

TEST_CASE("prox_qg_example") {
  CHECK(prox_qg_example(0.5, 1.0) == 0.0);
  CHECK(prox_qg_example(5.0, 1.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(prox_qg_example(0.0, 1.0) == 0.0);
  CHECK(prox_qg_example(-5.0, 1.0) == doctest::Approx(-5.0 / 3.0).epsilon(1e-15));
  // Between the branches the breakpoint u = 1 wins: v = 2.5, tau = 1 gives
  // |u| < 1 candidate 1.5 (outside), quadratic candidate 5/6 (inside), so u = 1.
  CHECK(prox_qg_example(2.5, 1.0) == 1.0);
}

TEST_CASE("phi of the QG example") {
  CHECK(QgExampleRegularizer::phi(0.5) == 0.5);
  CHECK(QgExampleRegularizer::phi(-2.0) == 4.0);
  CHECK(QgExampleRegularizer::phi(1.0) == 1.0);
}

TEST_CASE("catalog regularizer proxes pass the brute-force check") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> vd(-4.0, 4.0), td(0.05, 2.0);
  const L1Norm l1(0.7);
  const QgExampleRegularizer qg;
  const ZeroRegularizer zero;
  for (int t = 0; t < 1000; ++t) {
    const double v = vd(rng), tau = td(rng);
    CHECK(prox_check_1d(l1, v, tau, 5.0, 1e-3) <= 1e-3);
    CHECK(prox_check_1d(qg, v, tau, 5.0, 1e-3) <= 1e-3);
    CHECK(prox_check_1d(zero, v, tau, 5.0, 1e-3) <= 1e-3);
  }
}

TEST_CASE("prox maps are nonexpansive") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd(0.0, 3.0);
  const L1Norm l1(0.4);
  const QgExampleRegularizer qg;
  for (int t = 0; t < 500; ++t) {
    Vector a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a(i) = nd(rng);
      b(i) = nd(rng);
    }
    CHECK((l1.prox(a, 0.8) - l1.prox(b, 0.8)).norm() <= (a - b).norm() * (1 + 1e-14));
    CHECK((qg.prox(a, 0.8) - qg.prox(b, 0.8)).norm() <= (a - b).norm() * (1 + 1e-14));
  }
}

TEST_CASE("prox_weighted applies per-coordinate steps") {
  const L1Norm l1(1.0);
  const Vector out = l1.prox_weighted(vec({3.0, 3.0}), vec({1.0, 2.0}));
  CHECK(out(0) == 2.0);
  CHECK(out(1) == 1.0);
  const CounterexampleRegion region;
  CHECK_THROWS_AS(region.prox_weighted(vec({0, 0}), vec({1, 1})), UsageError);
}

TEST_CASE("counterexample_eval") {
  CHECK(counterexample_eval(0, 0) == 0.0);
  CHECK(counterexample_eval(-1, 1) == doctest::Approx(-1 + std::sqrt(2.0)).epsilon(1e-15));
  CHECK(counterexample_eval(1, 1) == kInf);
}

TEST_CASE("counterexample_trace") {
  const auto trace = counterexample_trace(10000);
  REQUIRE(trace.size() == 10001);
  CHECK(trace[0].x == -1.0);
  CHECK(trace[0].y == 1.0);
  CHECK(trace[0].value == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-15));
  for (std::size_t k = 0; k < trace.size(); ++k) {
    CHECK(trace[k].distance == 1.0);
    if (k > 0) CHECK(trace[k].value < trace[k - 1].value);
  }
  // F(z_k) = sqrt(s^2 + 1) - s with s = H_{k+1}; at k = 100, s = 5.1973775...
  double s = 0.0;
  for (int i = 1; i <= 101; ++i) s += 1.0 / i;
  CHECK(trace[100].value == doctest::Approx(std::sqrt(s * s + 1) - s).epsilon(1e-12));
  CHECK(trace[100].value == doctest::Approx(0.0953299122185731).epsilon(1e-12));
}

TEST_CASE("grad_check_fd") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Vector x(4);
  for (int i = 0; i < 4; ++i) x(i) = nd(rng);
  CHECK(grad_check_fd(*testing_util::half_sq(4), x, 1e-5) < 1e-9);
  CHECK(grad_check_fd(QuarticFunction(), vec({2.0}), 1e-4) < 1e-6);
  const auto inst = catalog_instantiate("logistic-l1", 6, 4);
  Vector z(6);
  for (int i = 0; i < 6; ++i) z(i) = nd(rng);
  CHECK(grad_check_fd(*inst.objective.smooth, z, 1e-5) < 1e-5);
  CHECK_THROWS_AS(grad_check_fd(QuarticFunction(), vec({1.0}), 0.0), UsageError);
}

TEST_CASE("smooth catalog terms are convex on random pairs") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  for (const char* name : {"sc-quadratic-l1", "logistic-l1", "quartic", "fbs-reference"}) {
    const auto inst = catalog_instantiate(name, 5, 2);
    const auto& f = *inst.objective.smooth;
    for (int t = 0; t < 200; ++t) {
      Vector x(5), y(5);
      for (int i = 0; i < 5; ++i) {
        x(i) = 2 * nd(rng);
        y(i) = 2 * nd(rng);
      }
      const double l = ud(rng);
      CHECK(f.value(l * x + (1 - l) * y) <= l * f.value(x) + (1 - l) * f.value(y) + 1e-9);
    }
  }
}

TEST_CASE("catalog_instantiate metadata") {
  SUBCASE("qg-not-ossc in 1D") {
    const auto inst = catalog_instantiate("qg-not-ossc", 1, 0);
    CHECK(*inst.known_F_star == 0.0);
    CHECK(*inst.known_qg_mu == 2.0);
    CHECK(inst.objective.dimension == 1);
  }
  SUBCASE("quartic") {
    const auto inst = catalog_instantiate("quartic", 3, 0);
    CHECK(*inst.known_F_star == 0.0);
    CHECK((*inst.known_projector)(inst.x0) == Vector::Zero(3));
    CHECK(inst.level_bounded);
    CHECK_FALSE(inst.known_qg_mu.has_value());
    CHECK(*inst.known_local_L > 0.0);
  }
  SUBCASE("sc-quadratic-l1 carries F* and mu") {
    const auto inst = catalog_instantiate("sc-quadratic-l1", 5, 42);
    REQUIRE(inst.known_F_star);
    REQUIRE(inst.known_qg_mu);
    CHECK(*inst.known_qg_mu > 0.0);
    CHECK(eval_F(inst.objective, inst.x0) >= *inst.known_F_star);
  }
  SUBCASE("counterexample is fixture-only and two-dimensional") {
    CHECK(catalog_instantiate("counterexample-region", 2, 0).fixture_only);
    CHECK_THROWS_AS(catalog_instantiate("counterexample-region", 3, 0), UsageError);
  }
  SUBCASE("unknown names") {
    CHECK_THROWS_AS(catalog_instantiate("rosenbrock", 2, 0), UsageError);
  }
  SUBCASE("catalog is deterministic in the seed") {
    const auto a = catalog_instantiate("logistic-l1", 6, 8);
    const auto b = catalog_instantiate("logistic-l1", 6, 8);
    CHECK(a.x0 == b.x0);
    CHECK(eval_F(a.objective, a.x0 + Vector::Ones(6)) == eval_F(b.objective, b.x0 + Vector::Ones(6)));
  }
}

TEST_CASE("known projectors land on F*") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (const char* name : {"sc-quadratic-l1", "quartic", "qg-not-ossc"}) {
    const auto inst = catalog_instantiate(name, 4, 1);
    REQUIRE(inst.known_projector);
    for (int t = 0; t < 20; ++t) {
      Vector x(4);
      for (int i = 0; i < 4; ++i) x(i) = nd(rng);
      const double F = eval_F(inst.objective, (*inst.known_projector)(x));
      CHECK(std::abs(F - *inst.known_F_star) <= 1e-9 * (1 + std::abs(F)));
    }
  }
}

TEST_CASE("qg-not-ossc grows at least like x^2") {
  const auto inst = catalog_instantiate("qg-not-ossc", 1, 0);
  for (int i = 0; i <= 10000; ++i) {
    const double x = -5.0 + i * 1e-3;
    CHECK(eval_F(inst.objective, vec({x})) >= x * x - 1e-15);
  }
}

TEST_CASE("quartic gradient is not globally Lipschitz") {
  QuarticFunction f;
  double prev = 0.0;
  for (double t : {1.0, 10.0, 100.0}) {
    const double ratio = (f.gradient(vec({t})) - f.gradient(vec({0.0}))).norm() / t;
    CHECK(ratio == doctest::Approx(t * t));
    CHECK(ratio > prev);
    prev = ratio;
  }
}
