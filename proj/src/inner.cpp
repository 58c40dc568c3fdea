#include "isqa/inner.hpp"

#include <fmt/format.h>

#include <cmath>
#include <sstream>

namespace isqa {

std::string_view to_string(InnerMode mode) {
  switch (mode) {
    case InnerMode::fixed_count:
      return "fixed-count";
    case InnerMode::certificate:
      return "certificate";
    case InnerMode::near_exact:
      return "near-exact";
  }
  return "?";
}

InnerMode parse_inner_mode(std::string_view text) {
  if (text == "fixed-count") return InnerMode::fixed_count;
  if (text == "certificate") return InnerMode::certificate;
  if (text == "near-exact") return InnerMode::near_exact;
  throw UsageError(fmt::format("unknown inner mode '{}'", text));
}

InexactnessPolicy InexactnessPolicy::certificate(double eta, double sigma) {
  InexactnessPolicy p;
  p.mode = InnerMode::certificate;
  p.eta = eta;
  p.sigma = sigma;
  p.validate();
  return p;
}

InexactnessPolicy InexactnessPolicy::fixed_count(std::size_t n_inner, double sigma) {
  InexactnessPolicy p;
  p.mode = InnerMode::fixed_count;
  p.n_inner = n_inner;
  p.sigma = sigma;
  p.eta = p.effective_eta();
  p.validate();
  return p;
}

InexactnessPolicy InexactnessPolicy::near_exact(double sigma, double tol) {
  InexactnessPolicy p;
  p.mode = InnerMode::near_exact;
  p.eta = 1.0;
  p.sigma = sigma;
  p.near_exact_tol = tol;
  p.validate();
  return p;
}

double InexactnessPolicy::effective_eta() const {
  switch (mode) {
    case InnerMode::fixed_count:
      return 1.0 - std::pow(1.0 - sigma, static_cast<double>(n_inner));
    case InnerMode::certificate:
      return eta;
    case InnerMode::near_exact:
      return 1.0;
  }
  return eta;
}

void InexactnessPolicy::validate() const {
  if (!(sigma > 0.0) || !(sigma <= 1.0)) {
    throw UsageError(fmt::format("inexactness.sigma must lie in (0, 1] (got {})", sigma));
  }
  switch (mode) {
    case InnerMode::fixed_count:
      if (n_inner == 0) throw UsageError("inexactness.n_inner must be at least 1");
      break;
    case InnerMode::certificate:
      if (!(eta > 0.0) || !(eta < 1.0)) {
        throw UsageError(fmt::format(
            "inexactness.eta must lie in (0, 1) in certificate mode (got {}); use fixed-count or "
            "near-exact for eta = 1",
            eta));
      }
      break;
    case InnerMode::near_exact:
      if (!(near_exact_tol >= 0.0)) throw UsageError("inexactness.near_exact_tol must be >= 0");
      break;
  }
  if (max_iterations && *max_iterations == 0) {
    throw UsageError("inexactness.max_iterations must be at least 1");
  }
}

Vector prox_grad_step(const SubproblemModel& model, const Vector& y, double tau) {
  const double limit = 1.0 / model.metric().spectral_max();
  if (!(tau > 0.0) || tau > limit * (1.0 + 1e-12)) {
    throw UsageError(fmt::format("prox_grad_step: tau = {} must lie in (0, 1/M_k] = (0, {}]", tau, limit));
  }
  const Vector forward = y - tau * model.smooth_gradient(y);
  return model.objective().regularizer->prox(forward, tau);
}

Vector subgrad_residual(const SubproblemModel& model, const Vector& y_prev, const Vector& y_next,
                        double tau) {
  // grad q(y_next) - grad q(y_prev) = H (y_next - y_prev)
  return model.metric().apply(y_next - y_prev) + (y_prev - y_next) / tau;
}

double certificate_gap_bound(const SubproblemModel& model, const Vector& xi) {
  return xi.squaredNorm() / (2.0 * model.metric().spectral_min());
}

std::size_t default_inner_cap(const SubproblemModel& model, const InexactnessPolicy& policy) {
  if (policy.max_iterations) return *policy.max_iterations;
  const double ratio = model.metric().spectral_max() / model.metric().spectral_min();
  double log_term = 0.0;
  switch (policy.mode) {
    case InnerMode::fixed_count:
      return policy.n_inner;
    case InnerMode::certificate:
      log_term = std::log(1.0 / (1.0 - policy.eta));
      break;
    case InnerMode::near_exact:
      log_term = std::log(1e16);
      break;
  }
  const double cap = 10.0 * std::ceil(ratio * log_term);
  return cap < 1.0 ? 1 : static_cast<std::size_t>(cap);
}

namespace {

[[noreturn]] void non_finite_failure(std::size_t l, const Vector& y_prev, const Vector& y) {
  std::ostringstream os;
  os << "inner_solve: non-finite Q at iteration " << l << "\n  y_prev = " << y_prev.transpose()
     << "\n  y      = " << y.transpose();
  throw NumericalError(os.str());
}

}  // namespace

InnerResult inner_solve(const SubproblemModel& model, const InexactnessPolicy& policy,
                        const InnerObserver& observer) {
  policy.validate();
  const double tau = 1.0 / model.metric().spectral_max();
  const std::size_t cap = default_inner_cap(model, policy);

  Vector y = model.anchor();
  if (observer) observer(0, y, 0.0);  // Q_k(x_k) = 0

  // Best iterate seen; the anchor guarantees Q_value <= 0.
  InnerResult result;
  result.candidate = y;
  result.Q_value = 0.0;

  const double eta = policy.effective_eta();
  const double factor = policy.mode == InnerMode::certificate ? eta / (1.0 - eta) : 0.0;

  for (std::size_t l = 1; l <= cap; ++l) {
    Vector next = prox_grad_step(model, y, tau);
    const double q_next = model.Q(next);
    if (!std::isfinite(q_next)) non_finite_failure(l, y, next);
    const Vector xi = subgrad_residual(model, y, next, tau);
    if (observer) observer(l, next, q_next);

    result.iterations_used = l;
    result.residual_norm = xi.norm();
    if (q_next <= result.Q_value) {
      result.candidate = next;
      result.Q_value = q_next;
    }

    bool done = false;
    switch (policy.mode) {
      case InnerMode::fixed_count:
        done = l >= policy.n_inner;
        if (done) result.certified = true;
        break;
      case InnerMode::certificate:
        if (q_next <= -factor * certificate_gap_bound(model, xi)) {
          result.candidate = next;
          result.Q_value = q_next;
          result.certified = true;
          done = true;
        }
        break;
      case InnerMode::near_exact:
        if (result.residual_norm <= policy.near_exact_tol) {
          result.candidate = next;
          result.Q_value = q_next;
          result.certified = q_next <= 0.0;
          done = true;
        }
        break;
    }
    if (done) break;
    y = std::move(next);
  }
  if (result.Q_value > 0.0) {
    result.candidate = model.anchor();
    result.Q_value = 0.0;
  }
  return result;
}

std::vector<Vector> prox_grad_trajectory(const SubproblemModel& model, std::size_t steps) {
  const double tau = 1.0 / model.metric().spectral_max();
  std::vector<Vector> out;
  out.reserve(steps + 1);
  out.push_back(model.anchor());
  for (std::size_t l = 0; l < steps; ++l) out.push_back(prox_grad_step(model, out.back(), tau));
  return out;
}

}  // namespace isqa
