#include "isqa/core.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <random>
#include <utility>

namespace isqa {

bool all_finite(const Vector& v) { return v.allFinite(); }

Vector Regularizer::prox_weighted(const Vector& /*v*/, const Vector& /*taus*/) const {
  throw UsageError("prox_weighted requires a separable regularizer");
}

bool Regularizer::in_domain(const Vector& x) const { return std::isfinite(value(x)); }

double eval_F(const ObjectiveSplit& obj, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != obj.dimension) {
    throw UsageError(fmt::format("eval_F: dimension mismatch (got {}, expected {})",
                                 x.size(), obj.dimension));
  }
  const double g = obj.regularizer->value(x);
  if (!std::isfinite(g)) return kInf;
  return obj.smooth->value(x) + g;
}

// ---------------------------------------------------------------------------
// Metric

Metric::Metric(Kind kind, std::size_t n, double m, double M)
    : kind_(kind), n_(n), m_(m), M_(M), lo_(m), hi_(M) {
  if (n == 0) throw UsageError("Metric: dimension must be positive");
  if (!(m > 0.0) || !std::isfinite(M) || !(m <= M)) {
    throw UsageError(fmt::format("Metric: bounds must satisfy 0 < m <= M (m={}, M={})", m, M));
  }
}

Metric Metric::scaled_identity(double scale, std::size_t n) {
  Metric metric(Kind::scaled_identity, n, scale, scale);
  metric.scale_ = scale;
  return metric;
}

Metric Metric::diagonal(Vector entries) {
  if (entries.size() == 0) throw UsageError("Metric: dimension must be positive");
  const double lo = entries.minCoeff();
  const double hi = entries.maxCoeff();
  return diagonal(std::move(entries), lo, hi);
}

Metric Metric::diagonal(Vector entries, double m, double M) {
  if (!all_finite(entries)) throw UsageError("Metric: non-finite diagonal entry");
  Metric metric(Kind::diagonal, entries.size(), m, M);
  metric.lo_ = std::clamp(entries.minCoeff(), m, M);
  metric.hi_ = std::clamp(entries.maxCoeff(), m, M);
  metric.diag_ = std::move(entries);
  return metric;
}

Metric Metric::dense(Matrix H, double m, double M) {
  if (H.rows() != H.cols()) throw UsageError("Metric: operator must be square");
  if (!H.allFinite()) throw UsageError("Metric: non-finite operator entry");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw UsageError("Metric: operator must be symmetric");
  }
  Metric metric(Kind::dense, H.rows(), m, M);
  metric.dense_ = std::move(H);
  return metric;
}

Metric Metric::dense(Matrix H, double m, double M, double lo, double hi) {
  Metric metric = dense(std::move(H), m, M);
  if (!(lo <= hi)) throw UsageError(fmt::format("Metric: spectral range [{}, {}] is empty", lo, hi));
  // widened a little: the reconstructed operator carries rounding
  metric.lo_ = std::clamp(lo * (1.0 - 1e-12), m, M);
  metric.hi_ = std::clamp(hi * (1.0 + 1e-12), m, M);
  return metric;
}

Vector Metric::apply(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != n_) {
    throw UsageError(fmt::format("Metric::apply: dimension mismatch (got {}, expected {})",
                                 v.size(), n_));
  }
  switch (kind_) {
    case Kind::scaled_identity:
      return scale_ * v;
    case Kind::diagonal:
      return diag_.cwiseProduct(v);
    case Kind::dense:
      return dense_ * v;
  }
  return v;
}

Vector Metric::diagonal_entries() const {
  switch (kind_) {
    case Kind::scaled_identity:
      return Vector::Constant(n_, scale_);
    case Kind::diagonal:
      return diag_;
    case Kind::dense:
      break;
  }
  throw UsageError("Metric::diagonal_entries: metric is not diagonal");
}

Matrix Metric::to_dense() const {
  switch (kind_) {
    case Kind::scaled_identity:
      return scale_ * Matrix::Identity(n_, n_);
    case Kind::diagonal:
      return diag_.asDiagonal();
    case Kind::dense:
      return dense_;
  }
  return {};
}

double metric_norm_sq(const Metric& metric, const Vector& v) {
  return v.dot(metric.apply(v));
}

MetricBoundReport validate_metric_bounds(const Metric& metric, std::size_t trials,
                                         std::uint64_t seed) {
  if (trials == 0) throw UsageError("validate_metric_bounds: trials must be >= 1");
  const std::size_t n = metric.dimension();
  const double lo = metric.spectral_min() * (1.0 - 1e-9);
  const double hi = metric.spectral_max() * (1.0 + 1e-9);
  MetricBoundReport report;

  auto probe = [&](const Vector& u) {
    const double q = metric_norm_sq(metric, u) / u.squaredNorm();
    report.min_quotient = std::min(report.min_quotient, q);
    report.max_quotient = std::max(report.max_quotient, q);
    ++report.probes;
    if (q < lo || q > hi) {
      Eigen::IOFormat fmt_row(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", ", ", "", "", "(", ")");
      std::ostringstream os;
      os << u.transpose().format(fmt_row);
      throw MetricBoundError(fmt::format(
          "metric bound violated: Rayleigh quotient {} outside [{}, {}] at v = {}", q,
          metric.spectral_min(), metric.spectral_max(), os.str()));
    }
  };

  if (metric.is_diagonal()) {
    for (std::size_t i = 0; i < n; ++i) probe(Vector::Unit(n, i));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t t = 0; t < trials; ++t) {
    Vector u(n);
    for (auto& c : u) c = normal(rng);
    if (u.norm() == 0.0) continue;
    probe(u.normalized());
  }
  return report;
}

// ---------------------------------------------------------------------------
// SubproblemModel

SubproblemModel::SubproblemModel(ObjectiveSplit obj, Metric metric, Vector anchor)
    : obj_(std::move(obj)), metric_(std::move(metric)), anchor_(std::move(anchor)) {
  if (static_cast<std::size_t>(anchor_.size()) != obj_.dimension ||
      metric_.dimension() != obj_.dimension) {
    throw UsageError("make_subproblem: dimension mismatch between objective, metric and anchor");
  }
  if (!all_finite(anchor_)) throw UsageError("make_subproblem: anchor has non-finite coordinates");
  g_ = obj_.regularizer->value(anchor_);
  if (!std::isfinite(g_)) throw UsageError("make_subproblem: anchor lies outside dom g");
  f_ = obj_.smooth->value(anchor_);
  grad_ = obj_.smooth->gradient(anchor_);
  if (!std::isfinite(f_) || !all_finite(grad_)) {
    throw NumericalError("make_subproblem: f or grad f not finite at the anchor");
  }
}

void SubproblemModel::check_dimension(const Vector& x) const {
  if (x.size() != anchor_.size()) {
    throw UsageError(fmt::format("subproblem model: dimension mismatch (got {}, expected {})",
                                 x.size(), anchor_.size()));
  }
}

double SubproblemModel::Delta(const Vector& x) const {
  check_dimension(x);
  const double g = obj_.regularizer->value(x);
  if (!std::isfinite(g)) return kInf;
  return grad_.dot(x - anchor_) + (g - g_);
}

double SubproblemModel::Q(const Vector& x) const {
  const double delta = Delta(x);
  if (!std::isfinite(delta)) return delta;
  return delta + 0.5 * metric_norm_sq(metric_, x - anchor_);
}

Vector SubproblemModel::smooth_gradient(const Vector& y) const {
  check_dimension(y);
  return grad_ + metric_.apply(y - anchor_);
}

SubproblemModel make_subproblem(const ObjectiveSplit& obj, const Metric& metric,
                                const Vector& x_k) {
  return SubproblemModel(obj, metric, x_k);
}

double eval_Q(const SubproblemModel& model, const Vector& x) { return model.Q(x); }

double eval_Delta(const SubproblemModel& model, const Vector& x) { return model.Delta(x); }

}  // namespace isqa
