#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "isqa/metric_policy.hpp"

using namespace isqa;
using testing_util::vec;

namespace {

MetricHistory history_with(const MetricPolicy& policy, const std::vector<std::pair<Vector, Vector>>& pts) {
  MetricHistory h(history_capacity(policy));
  for (const auto& [x, g] : pts) h.push(x, g);
  return h;
}

}  // namespace

TEST_CASE("scaled identity ignores history") {
  const auto policy = MetricPolicy::scaled_identity(2.0);
  const auto h = history_with(policy, {});
  const Metric m = next_metric(policy, h, 3);
  CHECK(m.m() == 0.5);
  CHECK(m.M() == 0.5);
  CHECK(m.to_dense().isApprox(0.5 * Matrix::Identity(3, 3)));
  CHECK(history_capacity(policy) == 0);
}

TEST_CASE("clipped diagonal clamps a secant estimate") {
  const auto policy = MetricPolicy::clipped_diagonal(0.5, 2.0);
  // y_i / s_i = (0.1, 5)
  const auto h = history_with(policy, {{vec({0, 0}), vec({0, 0})}, {vec({1, 1}), vec({0.1, 5})}});
  const Metric m = next_metric(policy, h, 2);
  REQUIRE(m.is_diagonal());
  CHECK(m.diagonal_entries()(0) == 0.5);
  CHECK(m.diagonal_entries()(1) == 2.0);
  CHECK(m.m() == 0.5);
  CHECK(m.M() == 2.0);
}

TEST_CASE("clipped policies fall back to the geometric midpoint") {
  for (const auto& policy : {MetricPolicy::clipped_diagonal(0.5, 8.0), MetricPolicy::clipped_secant(0.5, 8.0, 3)}) {
    MetricHistory empty(history_capacity(policy));
    const Metric m = next_metric(policy, empty, 2);
    CHECK(m.to_dense().isApprox(2.0 * Matrix::Identity(2, 2)));
    CHECK(m.m() == 0.5);
    CHECK(m.M() == 8.0);
  }
}

TEST_CASE("clip_spectrum") {
  Matrix c = Matrix::Zero(2, 2);
  c.diagonal() << 0.01, 10;
  CHECK(clip_spectrum(c, 1, 2).to_dense().isApprox((Matrix(2, 2) << 1, 0, 0, 2).finished()));

  Matrix in_band(2, 2);
  in_band << 1.5, 0.2, 0.2, 1.2;
  CHECK((clip_spectrum(in_band, 0.5, 3).to_dense() - in_band).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK(clip_spectrum(Matrix::Identity(3, 3), 0.5, 2).to_dense() == Matrix::Identity(3, 3));

  Matrix asym(2, 2);
  asym << 1, 0.3, 0, 1;
  CHECK_THROWS_AS(clip_spectrum(asym, 0.5, 2), UsageError);
}

TEST_CASE("every policy output satisfies its declared bounds") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  const std::vector<MetricPolicy> policies = {
      MetricPolicy::scaled_identity(0.25), MetricPolicy::clipped_diagonal(0.1, 10.0),
      MetricPolicy::clipped_secant(0.1, 10.0, 4)};
  for (const auto& policy : policies) {
    MetricHistory h(history_capacity(policy));
    for (int k = 0; k < 30; ++k) {
      Vector x(4), g(4);
      for (int i = 0; i < 4; ++i) {
        x(i) = nd(rng);
        g(i) = 5 * nd(rng);  // arbitrary, including negative curvature pairs
      }
      h.push(x, g);
      const Metric m = next_metric(policy, h, 4);
      CHECK(m.m() == policy.m);
      CHECK(m.M() == policy.M);
      CHECK_NOTHROW(validate_metric_bounds(m, 50, static_cast<std::uint64_t>(k)));
    }
  }
}

TEST_CASE("policy validation") {
  CHECK_THROWS_AS(MetricPolicy::clipped_diagonal(2.0, 1.0), UsageError);
  CHECK_THROWS_AS(MetricPolicy::clipped_diagonal(0.0, 1.0), UsageError);
  CHECK_THROWS_AS(MetricPolicy::scaled_identity(0.0), UsageError);
  CHECK(parse_metric_kind("clipped-secant") == MetricKind::clipped_secant);
  CHECK_THROWS_AS(parse_metric_kind("bfgs"), UsageError);
}

TEST_CASE("history keeps the most recent samples") {
  MetricHistory h(2);
  h.push(vec({1}), vec({1}));
  h.push(vec({2}), vec({2}));
  h.push(vec({3}), vec({3}));
  REQUIRE(h.samples().size() == 2);
  CHECK(h.samples().front().x(0) == 2);
  CHECK(h.samples().back().x(0) == 3);
}

TEST_CASE("spectral range tracks the operator, not the policy band") {
  const auto d = Metric::diagonal(vec({0.7, 1.3}), 0.5, 2.0);
  CHECK(d.spectral_min() == 0.7);
  CHECK(d.spectral_max() == 1.3);
  CHECK(d.m() == 0.5);

  Matrix c(2, 2);
  c << 1.0, 0.5, 0.5, 1.0;  // eigenvalues 0.5 and 1.5
  const Metric dense = clip_spectrum(c, 0.1, 10.0);
  CHECK(dense.spectral_min() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(dense.spectral_max() == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(dense.spectral_min() <= 0.5);
  CHECK(dense.spectral_max() >= 1.5);
  CHECK_NOTHROW(validate_metric_bounds(dense, 200, 3));

  CHECK_THROWS_AS(validate_metric_bounds(Metric::dense(c, 0.1, 10.0, 0.6, 1.5), 200, 3), MetricBoundError);
}
