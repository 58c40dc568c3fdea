#include "isqa/diagnostics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "isqa/inner.hpp"

namespace isqa {

namespace {

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::size_t decade_length(std::size_t n) { return std::max<std::size_t>(1, (n + 9) / 10); }

bool uses_gamma_in_bound(LineSearchVariant variant) { return variant == LineSearchVariant::ls1; }

double sqrt_one_minus(double eta) { return std::sqrt(std::max(0.0, 1.0 - eta)); }

}  // namespace

DecayVerdict decade_decay(std::span<const double> values, std::size_t first) {
  DecayVerdict verdict;
  if (first >= values.size() || values.size() - first < kMinDecadeSamples) {
    verdict.pass = true;
    verdict.insufficient_data = true;
    return verdict;
  }
  const auto tail = values.subspan(first);
  const std::size_t len = decade_length(tail.size());
  verdict.head_mean = mean_of(tail.first(len));
  verdict.tail_mean = mean_of(tail.last(len));
  verdict.pass = verdict.tail_mean <= kDecayRatio * verdict.head_mean ||
                 (verdict.head_mean == 0.0 && verdict.tail_mean == 0.0);
  return verdict;
}

double mid_run_mean(std::span<const double> values, std::size_t first) {
  if (first >= values.size()) throw UsageError("mid_run_mean: empty range");
  const auto tail = values.subspan(first);
  const std::size_t len = decade_length(tail.size());
  const std::size_t start = (tail.size() - len) / 2;
  return mean_of(tail.subspan(start, len));
}

RateReport qlinear_ratio(const SolveReport& report, double F_star, std::size_t burn_in) {
  RateReport out;
  const std::size_t K = report.records.size();
  std::vector<double> F(K + 1);
  for (std::size_t k = 0; k < K; ++k) F[k] = report.records[k].F_k;
  F[K] = report.final_F;

  for (std::size_t k = 0; k <= K; ++k) {
    if (F[k] < F_star - 1e-12) {
      throw UsageError(fmt::format("inconsistent F*: F_{} = {} lies below F* = {}", k, F[k], F_star));
    }
  }

  for (std::size_t k = 0; k < K; ++k) {
    const double gap = F[k] - F_star;
    if (gap <= kGapFloor) break;
    const double ratio = std::max(0.0, F[k + 1] - F_star) / gap;
    out.q_ratios.push_back(ratio);
    if (ratio == 1.0) out.degenerate = true;
  }
  for (std::size_t i = burn_in; i < out.q_ratios.size(); ++i) {
    out.tail_q_max = std::max(out.tail_q_max, out.q_ratios[i]);
  }

  out.sublinear_scores.reserve(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    out.sublinear_scores.push_back(static_cast<double>(k) * (F[k] - F_star));
  }
  for (std::size_t k = 1; k < K; ++k) {
    const auto& d = report.records[k].dist_to_X;
    if (!d) break;
    out.r_linear_scores.push_back(std::pow(*d, 1.0 / static_cast<double>(k)));
  }
  return out;
}

double theorem_zeta(double eta, double mu, double M) {
  if (!(eta > 0.0 && eta <= 1.0)) throw UsageError("theorem_zeta: eta must lie in (0, 1]");
  if (!(mu > 0.0) || !(M > 0.0)) throw UsageError("theorem_zeta: mu and M must be positive");
  if (mu <= 2.0 * M) return eta * mu / (4.0 * M);
  return 1.0 - M / mu;
}

SublinearVerdict sublinear_score(const SolveReport& report, double F_star) {
  SublinearVerdict out;
  const std::size_t K = report.records.size();
  for (std::size_t k = 0; k <= K; ++k) {
    const double Fk = k < K ? report.records[k].F_k : report.final_F;
    out.scores.push_back(static_cast<double>(k) * (Fk - F_star));
  }
  out.decay = decade_decay(out.scores, 1);
  return out;
}

std::vector<double> theorem2_bound(const SolveReport& report, double F_star, double M, double R0,
                                   double gamma, double eta, LineSearchVariant variant) {
  if (report.records.empty()) return {kInf};
  const double factor = (uses_gamma_in_bound(variant) ? gamma : 1.0) * eta;
  const double numerator = M * R0 * R0 + (report.records.front().F_k - F_star);
  std::vector<double> bounds;
  bounds.reserve(report.records.size() + 1);
  bounds.push_back(kInf);
  double sum = 0.0;
  for (const auto& rec : report.records) {
    sum += rec.alpha_k * factor;
    bounds.push_back(sum > 0.0 ? numerator / sum : kInf);
  }
  return bounds;
}

std::optional<double> estimate_R0(const SolveReport& report) {
  std::optional<double> r;
  for (const auto& rec : report.records) {
    if (!rec.dist_to_X) continue;
    r = std::max(r.value_or(0.0), *rec.dist_to_X);
  }
  return r;
}

double stepsize_floor(LineSearchVariant variant, double beta, double gamma, double alpha_bar,
                      double eta, double m, double L) {
  if (!(L > 0.0)) throw UsageError("stepsize_floor: L must be positive");
  if (!(m > 0.0)) throw UsageError("stepsize_floor: m must be positive");
  double floor = 0.0;
  switch (variant) {
    case LineSearchVariant::ls1: {
      const double s = sqrt_one_minus(eta);
      floor = std::min(1.0, beta * (1.0 - gamma) * m * (eta + 1.0 + s) / (L * (1.0 + s)));
      break;
    }
    case LineSearchVariant::ls2:
      floor = std::min(1.0, beta * gamma / L);
      break;
    case LineSearchVariant::ls3:
    case LineSearchVariant::ls4:
      floor = std::min(1.0, beta * gamma * m / L);
      break;
  }
  return std::min(floor, alpha_bar);
}

bool stepsize_floor_audit(const SolveReport& report, double floor, std::size_t burn_in) {
  if (burn_in >= report.records.size()) {
    throw UsageError("stepsize_floor_audit: burn-in leaves no iterations to audit");
  }
  double lowest = kInf;
  for (std::size_t k = burn_in; k < report.records.size(); ++k) {
    lowest = std::min(lowest, report.records[k].alpha_k);
  }
  return lowest >= floor - 1e-12;
}

std::string_view to_string(RecursionVerdict verdict) {
  switch (verdict) {
    case RecursionVerdict::violated:
      return "hypothesis-violated";
    case RecursionVerdict::hypothesis_holds:
      return "hypothesis-holds";
    case RecursionVerdict::big_o_confirmed:
      return "O(1/k)-confirmed";
    case RecursionVerdict::little_o_confirmed:
      return "o(1/k)-confirmed";
  }
  return "?";
}

RecursionReport recursion_rate_check(std::span<const double> deltas,
                                     std::span<const double> lambdas,
                                     std::span<const double> As, double c) {
  if (deltas.size() != lambdas.size() || deltas.size() != As.size()) {
    throw UsageError("recursion_rate_check: sequences must have equal length");
  }
  if (!(c > 0.0 && c <= 1.0)) throw UsageError("recursion_rate_check: c must lie in (0, 1]");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] >= 0.0) || !(As[k] >= 0.0)) {
      throw UsageError(fmt::format("recursion_rate_check: delta and A must be nonnegative (k = {})", k));
    }
    if (!(lambdas[k] >= 0.0 && lambdas[k] <= 1.0)) {
      throw UsageError(fmt::format("recursion_rate_check: lambda_{} outside [0, 1]", k));
    }
  }

  RecursionReport out;
  for (std::size_t k = 0; k + 1 < deltas.size(); ++k) {
    const double rhs = deltas[k] + c * (-lambdas[k] * deltas[k] + As[k] * lambdas[k] * lambdas[k] / 2.0);
    if (deltas[k + 1] > rhs + 1e-12 * (1.0 + deltas[k])) {
      out.first_violation = k;
      return out;
    }
  }
  out.hypothesis_holds = true;
  out.verdict = RecursionVerdict::hypothesis_holds;

  const std::size_t K = deltas.size();
  if (K < 2 * kMinDecadeSamples) return out;

  std::vector<double> scaled(K);
  for (std::size_t k = 0; k < K; ++k) scaled[k] = static_cast<double>(k) * deltas[k];

  // k delta_k bounded: the late half never climbs more than 10% over the early half.
  const auto half = K / 2;
  const double early = *std::max_element(scaled.begin() + 1, scaled.begin() + half);
  const double late = *std::max_element(scaled.begin() + half, scaled.end());
  if (late > 1.1 * early + 1e-300) return out;
  out.verdict = RecursionVerdict::big_o_confirmed;

  const DecayVerdict a_decay = decade_decay(As, 1);
  const DecayVerdict k_decay = decade_decay(scaled, 1);
  if (a_decay.pass && k_decay.pass) out.verdict = RecursionVerdict::little_o_confirmed;
  return out;
}

namespace {

// Sampling points around the centre P_X(x0).
std::vector<Vector> growth_samples(const ProblemInstance& instance, const GrowthSampling& sampling) {
  if (!instance.known_F_star || !instance.known_projector) {
    throw UsageError(fmt::format("problem '{}' has no known F* and projector", instance.name));
  }
  if (sampling.samples == 0) throw UsageError("growth sampling needs at least one sample");
  const Vector centre = (*instance.known_projector)(instance.x0);
  double radius = sampling.radius.value_or((instance.x0 - centre).norm());
  if (!(radius > 0.0)) radius = 1.0;

  const auto n = centre.size();
  std::vector<Vector> pts;
  pts.reserve(sampling.samples);
  if (n == 1) {
    for (std::size_t i = 0; i < sampling.samples; ++i) {
      const double t = sampling.samples == 1
                           ? 0.5
                           : static_cast<double>(i) / static_cast<double>(sampling.samples - 1);
      Vector x(1);
      x(0) = centre(0) - radius + 2.0 * radius * t;
      pts.push_back(std::move(x));
    }
    return pts;
  }
  std::mt19937_64 rng(sampling.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  for (std::size_t i = 0; i < sampling.samples; ++i) {
    Vector dir(n);
    for (Eigen::Index j = 0; j < n; ++j) dir(j) = normal(rng);
    const double norm = dir.norm();
    if (norm == 0.0) continue;
    const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(n));
    pts.push_back(centre + (r / norm) * dir);
  }
  return pts;
}

}  // namespace

double qg_estimate(const ProblemInstance& instance, const GrowthSampling& sampling) {
  const auto pts = growth_samples(instance, sampling);
  const double F_star = *instance.known_F_star;
  double best = kInf;
  for (const auto& x : pts) {
    const double Fx = eval_F(instance.objective, x);
    if (!std::isfinite(Fx)) continue;
    const double dist = (x - (*instance.known_projector)(x)).norm();
    if (dist < 1e-9) continue;
    best = std::min(best, 2.0 * (Fx - F_star) / (dist * dist));
  }
  if (!std::isfinite(best)) throw UsageError("qg_estimate: no sample away from the solution set");
  return best;
}

std::optional<OsscWitness> ossc_violation_search(const ProblemInstance& instance, double mu,
                                                 const GrowthSampling& sampling) {
  const auto pts = growth_samples(instance, sampling);
  const double F_star = *instance.known_F_star;
  std::optional<OsscWitness> worst;
  double worst_excess = 0.0;
  for (const auto& x : pts) {
    const double Fx = eval_F(instance.objective, x);
    if (!std::isfinite(Fx)) continue;
    const Vector p = (*instance.known_projector)(x);
    const double dist_sq = (x - p).squaredNorm();
    if (dist_sq < 1e-18) continue;
    for (int i = 1; i <= 19; ++i) {
      const double lambda = 0.05 * i;
      const double lhs = eval_F(instance.objective, lambda * x + (1.0 - lambda) * p);
      const double rhs = lambda * Fx + (1.0 - lambda) * F_star -
                         mu * lambda * (1.0 - lambda) / 2.0 * dist_sq;
      const double excess = lhs - rhs - 1e-12 * (1.0 + std::abs(rhs));
      if (excess > worst_excess) {
        worst_excess = excess;
        worst = OsscWitness{x, lambda, lhs, rhs};
      }
    }
  }
  return worst;
}

DecayVerdict direction_decay_audit(const SolveReport& report) {
  std::vector<double> norms;
  norms.reserve(report.records.size());
  for (const auto& rec : report.records) norms.push_back(rec.dir_norm);
  return decade_decay(norms, 0);
}

void AuditResult::record(std::size_t k, double lhs, double rhs, double slack) {
  ++checked;
  const double excess = lhs - rhs - slack;
  worst_excess = std::max(worst_excess, excess);
  if (excess > 0.0) {
    ++violations;
    if (!first_violation) first_violation = k;
  }
}

double audit_slack(double F_k) { return 1e-10 * (1.0 + std::abs(F_k)); }

double sufficient_decrease_constant(LineSearchVariant variant, double gamma, double eta) {
  const double base = eta / (2.0 * (1.0 + sqrt_one_minus(eta)));
  return uses_gamma_in_bound(variant) ? gamma * base : base;
}

AuditResult audit_sufficient_decrease(const SolveReport& report, LineSearchVariant variant,
                                      double gamma, double eta) {
  const double c1 = sufficient_decrease_constant(variant, gamma, eta);
  AuditResult out;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& rec = report.records[i];
    if (!rec.certified) continue;
    const double lhs = report.F_after(i) - rec.F_k;
    const double rhs = -rec.alpha_k * c1 * rec.dir_norm_metric * rec.dir_norm_metric;
    out.record(rec.k, lhs, rhs, audit_slack(rec.F_k));
  }
  return out;
}

AuditResult audit_lemma2(const SolveReport& report, LineSearchVariant variant, double gamma) {
  const double scale = uses_gamma_in_bound(variant) ? gamma : 1.0;
  AuditResult out;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& rec = report.records[i];
    if (!rec.certified) continue;
    out.record(rec.k, report.F_after(i) - rec.F_k, scale * rec.alpha_k * rec.Q_bar,
               audit_slack(rec.F_k));
  }
  return out;
}

AuditResult audit_model_decrease(const SolveReport& report, double eta) {
  const double c = eta / (2.0 * (1.0 + sqrt_one_minus(eta)));
  AuditResult out;
  for (const auto& rec : report.records) {
    if (!rec.certified) continue;
    out.record(rec.k, rec.Q_bar, -c * rec.dir_norm_metric * rec.dir_norm_metric,
               audit_slack(rec.F_k));
  }
  return out;
}

AuditResult audit_summability(const SolveReport& report, LineSearchVariant variant, double gamma,
                              double eta, double F_star) {
  const double c1 = sufficient_decrease_constant(variant, gamma, eta);
  AuditResult out;
  if (report.records.empty()) return out;
  const double budget = report.records.front().F_k - F_star;
  double sum = 0.0;
  for (const auto& rec : report.records) {
    if (!rec.certified) continue;
    sum += rec.alpha_k * c1 * rec.dir_norm_metric * rec.dir_norm_metric;
    out.record(rec.k, sum, budget, 1e-8);
  }
  return out;
}

AuditResult audit_theorem2(const SolveReport& report, double F_star,
                           std::span<const double> bounds) {
  const std::size_t K = report.records.size();
  if (bounds.size() != K + 1) throw UsageError("audit_theorem2: expected one bound per iterate");
  AuditResult out;
  for (std::size_t k = 0; k <= K; ++k) {
    const double Fk = k < K ? report.records[k].F_k : report.final_F;
    if (!std::isfinite(bounds[k])) continue;
    out.record(k, Fk - F_star, bounds[k], 1e-10);
  }
  return out;
}

AuditResult audit_a4_contraction(const SubproblemModel& model, double Q_star, double sigma,
                                 std::size_t l_max) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw UsageError("audit_a4_contraction: sigma outside (0, 1]");
  const auto traj = prox_grad_trajectory(model, l_max);
  AuditResult out;
  for (std::size_t l = 0; l < traj.size(); ++l) {
    const double gap = model.Q(traj[l]) - Q_star;
    const double bound = std::pow(1.0 - sigma, static_cast<double>(l)) * (-Q_star);
    out.record(l, gap, bound, 1e-9 * std::abs(Q_star) + 1e-14);
  }
  return out;
}

bool certificate_sound(double Q_bar, double eta, double Q_star) {
  return Q_bar <= eta * Q_star + 1e-10;
}

}  // namespace isqa
