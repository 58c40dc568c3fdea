#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <string_view>

#include "isqa/core.hpp"

namespace isqa {

enum class MetricKind { scaled_identity, clipped_diagonal, clipped_secant };

std::string_view to_string(MetricKind kind);
MetricKind parse_metric_kind(std::string_view text);

/// How H_k is chosen each outer iteration. Every produced metric carries the
/// policy's bounds [m, M].
struct MetricPolicy {
  MetricKind kind = MetricKind::scaled_identity;
  double m = 1.0;
  double M = 1.0;
  /// Step of the scaled-identity policy, H = (1/tau) I.
  double tau = 1.0;
  /// Number of curvature pairs used by clipped-secant.
  std::size_t memory = 5;

  static MetricPolicy scaled_identity(double tau);
  static MetricPolicy clipped_diagonal(double m, double M);
  static MetricPolicy clipped_secant(double m, double M, std::size_t memory);

  void validate() const;
};

/// Most recent (x, grad f(x)) pairs, oldest first.
class MetricHistory {
 public:
  struct Sample {
    Vector x;
    Vector grad;
  };

  explicit MetricHistory(std::size_t capacity = 6) : capacity_(capacity) {}

  void push(Vector x, Vector grad);
  const std::deque<Sample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }

 private:
  std::size_t capacity_;
  std::deque<Sample> samples_;
};

/// Capacity a policy needs from its history.
std::size_t history_capacity(const MetricPolicy& policy);

Metric next_metric(const MetricPolicy& policy, const MetricHistory& history, std::size_t n);

/// diag(clamp(estimate_i, m, M)) with declared bounds [m, M].
Metric clamp_diagonal(const Vector& estimate, double m, double M);

/// Eigen-decomposes a symmetric candidate and clamps its spectrum into [m, M].
Metric clip_spectrum(const Matrix& candidate, double m, double M);

}  // namespace isqa
