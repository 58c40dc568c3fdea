#include "doctest.h"
#include "helpers.hpp"
#include "isqa/linesearch.hpp"

using namespace isqa;
using testing_util::vec;

namespace {

// f = x^2/2, g = 0, H = 1, x_k = 1, xbar = 0 (the exact model minimizer)
struct Scenario {
  ObjectiveSplit obj = testing_util::split(testing_util::half_sq(1), testing_util::zero_g(), 1);
  SubproblemModel model = make_subproblem(obj, Metric::scaled_identity(1.0, 1), vec({1}));
  Vector x_bar = vec({0});
};

}  // namespace

TEST_CASE("ls_condition hand cases") {
  const Scenario s;
  SUBCASE("LS1 accepts alpha = 1 at equality") {
    const auto c = ls_condition(LineSearchVariant::ls1, s.obj, s.model, s.x_bar, 1.0, 0.5);
    CHECK(c.accepted);
    CHECK(c.lhs == -0.5);
    CHECK(c.rhs == -0.5);
  }
  SUBCASE("LS2 rejects 0.5 and accepts 0.25") {
    CHECK_FALSE(ls_condition(LineSearchVariant::ls2, s.obj, s.model, s.x_bar, 0.5, 0.4).accepted);
    CHECK(ls_condition(LineSearchVariant::ls2, s.obj, s.model, s.x_bar, 0.25, 0.4).accepted);
  }
  SUBCASE("LS3 rejects 1 and accepts 0.5 at equality") {
    const auto c1 = ls_condition(LineSearchVariant::ls3, s.obj, s.model, s.x_bar, 1.0, 0.5);
    CHECK_FALSE(c1.accepted);
    CHECK(c1.lhs == -0.5);
    CHECK(c1.rhs == -0.75);
    const auto c2 = ls_condition(LineSearchVariant::ls3, s.obj, s.model, s.x_bar, 0.5, 0.5);
    CHECK(c2.accepted);
    CHECK(c2.lhs == -0.375);
    CHECK(c2.rhs == -0.375);
  }
  SUBCASE("LS4 matches LS3 when g = 0") {
    CHECK(ls_condition(LineSearchVariant::ls4, s.obj, s.model, s.x_bar, 0.5, 0.5).accepted);
    CHECK_FALSE(ls_condition(LineSearchVariant::ls4, s.obj, s.model, s.x_bar, 1.0, 0.5).accepted);
  }
}

TEST_CASE("backtrack on the hand scenario") {
  const Scenario s;
  const auto run = [&](LineSearchVariant v, double gamma) {
    return backtrack(LineSearchSpec{v, 0.5, gamma, 1.0, 200}, s.obj, s.model, s.x_bar);
  };
  CHECK(run(LineSearchVariant::ls1, 0.5).alpha == 1.0);
  const auto ls2 = run(LineSearchVariant::ls2, 0.4);
  CHECK(ls2.alpha == 0.25);
  CHECK(ls2.trials == 3);
  CHECK(run(LineSearchVariant::ls3, 0.5).alpha == 0.5);
  CHECK(run(LineSearchVariant::ls4, 0.5).alpha == 0.5);
}

TEST_CASE("zero direction returns alpha_bar in one trial") {
  const Scenario s;
  const auto out = backtrack(LineSearchSpec{LineSearchVariant::ls3, 0.5, 0.5, 0.7, 200}, s.obj,
                             s.model, s.model.anchor());
  CHECK(out.alpha == 0.7);
  CHECK(out.trials == 1);
}

TEST_CASE("LS3 takes the full step when the metric is twice the Hessian") {
  // H = c A: full step accepted iff gamma c >= 1, so never at H = A
  Matrix A(2, 2);
  A << 3, 1, 1, 2;
  const Vector b = vec({1, -1});
  auto f = std::make_shared<QuadraticFunction>(A, b);
  const auto obj = testing_util::split(f, testing_util::zero_g(), 2);
  const Vector x = vec({2, 2});
  const auto model = make_subproblem(obj, Metric::dense(2 * A, 2.7, 7.3), x);
  const Vector x_bar = x - A.ldlt().solve(model.grad_at_anchor()) / 2;
  const auto accept = backtrack(LineSearchSpec{LineSearchVariant::ls3, 0.5, 0.7, 1.0, 200}, obj, model, x_bar);
  CHECK(accept.alpha == 1.0);
  CHECK(accept.trials == 1);
  const auto reject = backtrack(LineSearchSpec{LineSearchVariant::ls3, 0.5, 0.4, 1.0, 200}, obj, model, x_bar);
  CHECK(reject.alpha == 0.5);
}

TEST_CASE("alpha is exactly alpha_bar beta^(trials - 1)") {
  Matrix A(2, 2);
  A << 50, 0, 0, 1;
  auto f = std::make_shared<QuadraticFunction>(A, vec({0, 0}));
  const auto obj = testing_util::split(f, testing_util::l1(0.1), 2);
  const auto model = make_subproblem(obj, Metric::scaled_identity(1.0, 2), vec({1, 1}));
  const Vector x_bar = vec({-3, 0});
  for (auto v : {LineSearchVariant::ls1, LineSearchVariant::ls3, LineSearchVariant::ls4}) {
    const auto out = backtrack(LineSearchSpec{v, 0.3, 0.5, 0.9, 200}, obj, model, x_bar);
    CHECK(out.trials > 1);
    CHECK(out.alpha == 0.9 * std::pow(0.3, static_cast<double>(out.trials - 1)));
  }
}

TEST_CASE("trial budget exhaustion is reported as an oracle problem") {
  // A wrong gradient oracle: reports the negative gradient.
  struct Liar final : SmoothFunction {
    double value(const Vector& x) const override { return 0.5 * x.squaredNorm(); }
    Vector gradient(const Vector& x) const override { return -x; }
  };
  const auto obj = testing_util::split(std::make_shared<Liar>(), testing_util::zero_g(), 1);
  const auto model = make_subproblem(obj, Metric::scaled_identity(1.0, 1), vec({1}));
  try {
    backtrack(LineSearchSpec{LineSearchVariant::ls3, 0.5, 0.5, 1.0, 30}, obj, model, vec({2}));
    FAIL("expected LineSearchFailure");
  } catch (const LineSearchFailure& e) {
    CHECK(std::string(e.what()).find("oracle bug") != std::string::npos);
  }
}

TEST_CASE("LineSearchSpec validation") {
  CHECK_THROWS_WITH(LineSearchSpec({LineSearchVariant::ls2, 0.5, 0.6, 1.0, 200}).validate(1.0),
                    "ls2.gamma must lie in (0, m/2) = (0, 0.5)");
  CHECK_NOTHROW(LineSearchSpec({LineSearchVariant::ls2, 0.5, 0.4, 1.0, 200}).validate(1.0));
  CHECK_THROWS_AS(LineSearchSpec({LineSearchVariant::ls1, 1.0, 0.5, 1.0, 200}).validate(1.0), UsageError);
  CHECK_THROWS_AS(LineSearchSpec({LineSearchVariant::ls3, 0.5, 1.0, 1.0, 200}).validate(1.0), UsageError);
  CHECK_THROWS_AS(LineSearchSpec({LineSearchVariant::ls4, 0.5, 0.5, 1.5, 200}).validate(1.0), UsageError);
  CHECK(parse_linesearch_variant("ls2") == LineSearchVariant::ls2);
  CHECK_THROWS_AS(parse_linesearch_variant("LS5"), UsageError);
}
