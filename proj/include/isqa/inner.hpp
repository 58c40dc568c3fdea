#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "isqa/core.hpp"

namespace isqa {

enum class InnerMode {
  /// Exactly n_inner prox-gradient steps; eta = 1 - (1 - sigma)^n_inner.
  fixed_count,
  /// Stop once the strong-convexity certificate implies
  /// Q_k(y) <= eta * Q_k^*. Requires eta < 1.
  certificate,
  /// eta = 1 surrogate: stop once |xi| <= near_exact_tol.
  near_exact,
};

std::string_view to_string(InnerMode mode);
InnerMode parse_inner_mode(std::string_view text);

struct InexactnessPolicy {
  InnerMode mode = InnerMode::certificate;
  double eta = 0.9;
  std::size_t n_inner = 5;
  /// Declared A4 contraction; m/M of the metric policy for the
  /// prox-gradient inner solver.
  double sigma = 0.5;
  /// Certificate/near-exact iteration cap; derived from M/m and eta when unset.
  std::optional<std::size_t> max_iterations;
  double near_exact_tol = 1e-12;

  static InexactnessPolicy certificate(double eta, double sigma);
  static InexactnessPolicy fixed_count(std::size_t n_inner, double sigma);
  static InexactnessPolicy near_exact(double sigma, double tol = 1e-12);

  /// The eta guaranteed by this policy (fixed-count derives it from sigma).
  double effective_eta() const;
  void validate() const;
};

struct InnerResult {
  Vector candidate;
  std::size_t iterations_used = 0;
  bool certified = false;
  double Q_value = 0.0;
  double residual_norm = 0.0;
};

/// y+ = prox_{tau g}(y - tau (grad f(x_k) + H (y - x_k))). Requires tau <= 1/M.
Vector prox_grad_step(const SubproblemModel& model, const Vector& y, double tau);

/// xi = grad q(y_next) - grad q(y_prev) + (y_prev - y_next)/tau, an element
/// of the subdifferential of Q_k at y_next.
Vector subgrad_residual(const SubproblemModel& model, const Vector& y_prev,
                        const Vector& y_next, double tau);

/// |xi|^2 / (2m): upper bound on Q_k(y) - Q_k^* when xi is a subgradient at y.
double certificate_gap_bound(const SubproblemModel& model, const Vector& xi);

/// Default cap 10 * ceil(M/m * log(1/(1 - eta))).
std::size_t default_inner_cap(const SubproblemModel& model, const InexactnessPolicy& policy);

/// Called with (l, y_l, Q_k(y_l)) for l = 0 (the anchor) and every step after it.
using InnerObserver = std::function<void(std::size_t, const Vector&, double)>;

InnerResult inner_solve(const SubproblemModel& model, const InexactnessPolicy& policy,
                        const InnerObserver& observer = {});

/// The prox-gradient sequence y_0 = x_k, ..., y_steps at tau = 1/M.
std::vector<Vector> prox_grad_trajectory(const SubproblemModel& model, std::size_t steps);

}  // namespace isqa
