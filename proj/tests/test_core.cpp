#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "isqa/core.hpp"
#include "isqa/problems.hpp"

using namespace isqa;
using testing_util::vec;

TEST_CASE("eval_F adds the two terms") {
  const auto obj = testing_util::split(testing_util::half_sq(2), testing_util::l1(), 2);
  CHECK(eval_F(obj, vec({1, -2})) == doctest::Approx(5.5).epsilon(1e-15));

  const auto zero = testing_util::split(std::make_shared<ZeroFunction>(3), testing_util::zero_g(), 3);
  CHECK(eval_F(zero, vec({4, -1, 2})) == 0.0);
}

TEST_CASE("eval_F is +inf off dom g") {
  const ObjectiveSplit obj{std::make_shared<ZeroFunction>(2), std::make_shared<CounterexampleRegion>(), 2};
  CHECK(eval_F(obj, vec({1, 1})) == kInf);
  CHECK(std::isfinite(eval_F(obj, vec({-1, 1}))));
}

TEST_CASE("eval_F rejects a dimension mismatch") {
  const auto obj = testing_util::split(testing_util::half_sq(2), testing_util::l1(), 2);
  CHECK_THROWS_AS(eval_F(obj, vec({1, 2, 3})), UsageError);
}

TEST_CASE("metric_norm_sq") {
  CHECK(metric_norm_sq(Metric::scaled_identity(1.0, 2), vec({3, 4})) == 25.0);
  CHECK(metric_norm_sq(Metric::diagonal(vec({2, 0.5})), vec({1, 1})) == 2.5);
  CHECK(metric_norm_sq(Metric::diagonal(vec({2, 0.5})), vec({0, 0})) == 0.0);
}

TEST_CASE("Metric construction checks") {
  CHECK_THROWS_AS(Metric::diagonal(vec({1, 2}), 2.0, 1.0), UsageError);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(Metric::dense(asym, 0.5, 2.0), UsageError);
}

TEST_CASE("dense metric is symmetric on random pairs") {
  Matrix H(3, 3);
  H << 2, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0;
  const Metric metric = Metric::dense(H, 0.5, 3.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    Vector u(3), v(3);
    for (int i = 0; i < 3; ++i) {
      u(i) = nd(rng);
      v(i) = nd(rng);
    }
    const double a = u.dot(metric.apply(v));
    const double b = v.dot(metric.apply(u));
    CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("validate_metric_bounds") {
  SUBCASE("identity passes with quotient 1") {
    const auto r = validate_metric_bounds(Metric::scaled_identity(1.0, 4), 100, 1);
    CHECK(r.min_quotient == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.max_quotient == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.probes >= 100);
  }
  SUBCASE("declared m above an eigenvalue fails") {
    CHECK_THROWS_AS(validate_metric_bounds(Metric::diagonal(vec({0.5, 2}), 1.0, 2.0), 10, 1),
                    MetricBoundError);
  }
  SUBCASE("exact eigen bounds pass") {
    const auto r = validate_metric_bounds(Metric::diagonal(vec({0.5, 2}), 0.5, 2.0), 10, 1);
    CHECK(r.min_quotient >= 0.5 * (1 - 1e-12));
    CHECK(r.max_quotient <= 2.0 * (1 + 1e-12));
  }
  SUBCASE("error names the vector") {
    try {
      validate_metric_bounds(Metric::diagonal(vec({0.5, 2}), 1.0, 2.0), 10, 1);
      FAIL("expected MetricBoundError");
    } catch (const MetricBoundError& e) {
      CHECK(std::string(e.what()).find("v = ") != std::string::npos);
    }
  }
}

TEST_CASE("make_subproblem caches the anchor data") {
  const auto obj = testing_util::split(testing_util::half_sq(1), testing_util::zero_g(), 1);
  const auto model = make_subproblem(obj, Metric::scaled_identity(1.0, 1), vec({1}));
  CHECK(model.grad_at_anchor()(0) == 1.0);
  CHECK(model.g_at_anchor() == 0.0);
  CHECK(eval_Q(model, vec({1})) == 0.0);
}

TEST_CASE("make_subproblem rejects anchors outside dom g") {
  const ObjectiveSplit obj{std::make_shared<ZeroFunction>(2), std::make_shared<CounterexampleRegion>(), 2};
  CHECK_THROWS_AS(make_subproblem(obj, Metric::scaled_identity(1.0, 2), vec({1, 1})), UsageError);
}

TEST_CASE("logistic gradient at the anchor matches finite differences") {
  Matrix A(2, 3);
  A << 1.0, -0.5, 2.0, -1.5, 0.3, 0.7;
  auto f = std::make_shared<LogisticLoss>(A, vec({1, -1}));
  const auto obj = testing_util::split(f, testing_util::zero_g(), 3);
  const auto model = make_subproblem(obj, Metric::scaled_identity(1.0, 3), Vector::Zero(3));
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Vector e = Vector::Zero(3);
    e(i) = h;
    const double fd = (f->value(e) - f->value(-e)) / (2 * h);
    CHECK(std::abs(fd - model.grad_at_anchor()(i)) < 1e-6);
  }
}

TEST_CASE("eval_Q hand values") {
  SUBCASE("linear f, g = 0, H = I, step -e1") {
    const auto obj = testing_util::split(testing_util::linear(vec({1, 0})), testing_util::zero_g(), 2);
    const auto model = make_subproblem(obj, Metric::scaled_identity(1.0, 2), vec({0, 0}));
    CHECK(eval_Q(model, vec({-1, 0})) == doctest::Approx(-0.5).epsilon(1e-15));
  }
  SUBCASE("grad 2, g = |x|, H = 1, x = -1") {
    const auto obj = testing_util::split(testing_util::linear(vec({2})), testing_util::l1(), 1);
    const auto model = make_subproblem(obj, Metric::scaled_identity(1.0, 1), vec({0}));
    CHECK(eval_Q(model, vec({-1})) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(eval_Q(model, vec({0})) == 0.0);
  }
  SUBCASE("Q is +inf off dom g") {
    const ObjectiveSplit obj{std::make_shared<ZeroFunction>(2), std::make_shared<CounterexampleRegion>(), 2};
    const auto model = make_subproblem(obj, Metric::scaled_identity(1.0, 2), vec({-1, 1}));
    CHECK(eval_Q(model, vec({1, 1})) == kInf);
  }
}

TEST_CASE("eval_Delta and the Q/Delta identity") {
  const auto obj1 = testing_util::split(testing_util::linear(vec({1})), testing_util::zero_g(), 1);
  const auto m1 = make_subproblem(obj1, Metric::scaled_identity(1.0, 1), vec({3}));
  CHECK(eval_Delta(m1, vec({2})) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(eval_Delta(m1, vec({3})) == 0.0);

  Matrix H(3, 3);
  H << 2, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0;
  auto inst = catalog_instantiate("sc-quadratic-l1", 3, 9);
  const auto model = make_subproblem(inst.objective, Metric::dense(H, 0.5, 3.0), inst.x0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 100; ++t) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = 3 * nd(rng);
    const Vector d = x - inst.x0;
    const double lhs = eval_Q(model, x) - eval_Delta(model, x);
    const double rhs = 0.5 * metric_norm_sq(model.metric(), d);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(eval_Q(model, x)) + rhs));
  }
}

TEST_CASE("Q is m-strongly convex on random triples") {
  auto inst = catalog_instantiate("logistic-l1", 4, 3);
  const Metric metric = Metric::diagonal(vec({0.7, 1.1, 2.0, 0.4}));
  const auto model = make_subproblem(inst.objective, metric, inst.x0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  for (int t = 0; t < 200; ++t) {
    Vector x(4), y(4);
    for (int i = 0; i < 4; ++i) {
      x(i) = nd(rng);
      y(i) = nd(rng);
    }
    const double l = ud(rng);
    const double lhs = eval_Q(model, l * x + (1 - l) * y);
    const double rhs = l * eval_Q(model, x) + (1 - l) * eval_Q(model, y) -
                       metric.m() * l * (1 - l) / 2 * (x - y).squaredNorm();
    CHECK(lhs <= rhs + 1e-9);
  }
}
