#include "isqa/metric_policy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <utility>

namespace isqa {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::scaled_identity:
      return "scaled-identity";
    case MetricKind::clipped_diagonal:
      return "clipped-diagonal";
    case MetricKind::clipped_secant:
      return "clipped-secant";
  }
  return "?";
}

MetricKind parse_metric_kind(std::string_view text) {
  if (text == "scaled-identity") return MetricKind::scaled_identity;
  if (text == "clipped-diagonal") return MetricKind::clipped_diagonal;
  if (text == "clipped-secant") return MetricKind::clipped_secant;
  throw UsageError(fmt::format("unknown metric kind '{}'", text));
}

MetricPolicy MetricPolicy::scaled_identity(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw UsageError("metric.tau must be positive");
  return {MetricKind::scaled_identity, 1.0 / tau, 1.0 / tau, tau, 0};
}

MetricPolicy MetricPolicy::clipped_diagonal(double m, double M) {
  MetricPolicy p{MetricKind::clipped_diagonal, m, M, 1.0, 1};
  p.validate();
  return p;
}

MetricPolicy MetricPolicy::clipped_secant(double m, double M, std::size_t memory) {
  MetricPolicy p{MetricKind::clipped_secant, m, M, 1.0, memory};
  p.validate();
  return p;
}

void MetricPolicy::validate() const {
  if (!(m > 0.0) || !std::isfinite(M) || !(m <= M)) {
    throw UsageError(fmt::format("metric bounds must satisfy 0 < m <= M (m={}, M={})", m, M));
  }
  if (kind == MetricKind::scaled_identity && !(std::abs(m * tau - 1.0) < 1e-12 && m == M)) {
    throw UsageError("scaled-identity metric requires m = M = 1/tau");
  }
  if (kind == MetricKind::clipped_secant && memory == 0) {
    throw UsageError("metric.memory must be at least 1");
  }
}

void MetricHistory::push(Vector x, Vector grad) {
  if (capacity_ == 0) return;
  samples_.push_back({std::move(x), std::move(grad)});
  while (samples_.size() > capacity_) samples_.pop_front();
}

std::size_t history_capacity(const MetricPolicy& policy) {
  switch (policy.kind) {
    case MetricKind::scaled_identity:
      return 0;
    case MetricKind::clipped_diagonal:
      return 2;
    case MetricKind::clipped_secant:
      return policy.memory + 1;
  }
  return 0;
}

Metric clamp_diagonal(const Vector& estimate, double m, double M) {
  return Metric::diagonal(estimate.cwiseMax(m).cwiseMin(M), m, M);
}

Metric clip_spectrum(const Matrix& candidate, double m, double M) {
  if (candidate.rows() != candidate.cols() || candidate.rows() == 0) {
    throw UsageError("clip_spectrum: candidate must be square and nonempty");
  }
  if (!candidate.allFinite()) throw UsageError("clip_spectrum: candidate has non-finite entries");
  const double scale = std::max(1.0, candidate.cwiseAbs().maxCoeff());
  if ((candidate - candidate.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw UsageError("clip_spectrum: candidate must be symmetric");
  }
  if (!(m > 0.0) || !(m <= M)) throw UsageError("clip_spectrum: need 0 < m <= M");

  Matrix off = candidate;
  off.diagonal().setZero();
  if (off.isZero(0.0)) return clamp_diagonal(candidate.diagonal(), m, M);

  const Matrix sym = 0.5 * (candidate + candidate.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector clamped = es.eigenvalues().cwiseMax(m).cwiseMin(M);
  Matrix H = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
  H = 0.5 * (H + H.transpose());
  return Metric::dense(std::move(H), m, M, clamped.minCoeff(), clamped.maxCoeff());
}

namespace {

Metric midpoint_metric(const MetricPolicy& policy, std::size_t n) {
  return Metric::diagonal(Vector::Constant(static_cast<Eigen::Index>(n), std::sqrt(policy.m * policy.M)),
                          policy.m, policy.M);
}

Metric secant_diagonal(const MetricPolicy& policy, const MetricHistory& history, std::size_t n) {
  const auto& samples = history.samples();
  const auto& prev = samples[samples.size() - 2];
  const auto& last = samples.back();
  const Vector s = last.x - prev.x;
  const Vector y = last.grad - prev.grad;
  const double ss = s.squaredNorm();
  if (!(ss > 0.0)) return midpoint_metric(policy, n);

  // Coordinatewise secant y_i / s_i where s_i carries weight; the scalar
  // Barzilai-Borwein ratio s'y / s's elsewhere.
  const double scalar = s.dot(y) / ss;
  Vector estimate(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double si = s[i];
    estimate[i] = si * si > 1e-16 * ss ? y[i] / si : scalar;
    if (!std::isfinite(estimate[i])) estimate[i] = std::sqrt(policy.m * policy.M);
  }
  return clamp_diagonal(estimate, policy.m, policy.M);
}

Metric secant_dense(const MetricPolicy& policy, const MetricHistory& history, std::size_t n) {
  const auto& samples = history.samples();
  const auto dim = static_cast<Eigen::Index>(n);

  // Initial scaling from the newest curvature pair, then BFGS updates
  // oldest to newest, skipping pairs without positive curvature.
  const Vector s_new = samples.back().x - samples[samples.size() - 2].x;
  const Vector y_new = samples.back().grad - samples[samples.size() - 2].grad;
  double delta = std::sqrt(policy.m * policy.M);
  const double sy_new = s_new.dot(y_new);
  if (sy_new > 0.0) delta = std::clamp(y_new.squaredNorm() / sy_new, policy.m, policy.M);

  Matrix B = delta * Matrix::Identity(dim, dim);
  for (std::size_t j = 1; j < samples.size(); ++j) {
    const Vector s = samples[j].x - samples[j - 1].x;
    const Vector y = samples[j].grad - samples[j - 1].grad;
    const double sy = s.dot(y);
    if (!(sy > 1e-12 * s.norm() * y.norm()) || !(sy > 0.0)) continue;
    const Vector Bs = B * s;
    const double sBs = s.dot(Bs);
    if (!(sBs > 0.0)) continue;
    B += y * y.transpose() / sy - Bs * Bs.transpose() / sBs;
  }
  B = 0.5 * (B + B.transpose());
  if (!B.allFinite()) return midpoint_metric(policy, n);
  return clip_spectrum(B, policy.m, policy.M);
}

}  // namespace

Metric next_metric(const MetricPolicy& policy, const MetricHistory& history, std::size_t n) {
  switch (policy.kind) {
    case MetricKind::scaled_identity:
      return Metric::scaled_identity(1.0 / policy.tau, n);
    case MetricKind::clipped_diagonal:
      if (history.samples().size() < 2) return midpoint_metric(policy, n);
      return secant_diagonal(policy, history, n);
    case MetricKind::clipped_secant:
      if (history.samples().size() < 2) return midpoint_metric(policy, n);
      return secant_dense(policy, history, n);
  }
  throw UsageError("next_metric: unknown policy kind");
}

}  // namespace isqa
