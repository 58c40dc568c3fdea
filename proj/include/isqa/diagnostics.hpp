#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "isqa/core.hpp"
#include "isqa/driver.hpp"
#include "isqa/linesearch.hpp"
#include "isqa/problems.hpp"

namespace isqa {

// ---------------------------------------------------------------------------
// Tail-versus-head decay of a sequence.
//
// Asymptotic statements (limits, o(1/k)) are approximated at desk scale by
// comparing the mean of the last tenth of a sequence ("tail decade") with
// the mean of the first tenth ("head decade"). The verdict passes when the
// tail mean is at most kDecayRatio times the head mean.

inline constexpr double kDecayRatio = 0.1;
inline constexpr std::size_t kMinDecadeSamples = 10;

struct DecayVerdict {
  double head_mean = 0.0;
  double tail_mean = 0.0;
  bool pass = false;
  bool insufficient_data = false;
};

/// Uses values[first..]; fewer than kMinDecadeSamples values pass vacuously
/// with insufficient_data set.
DecayVerdict decade_decay(std::span<const double> values, std::size_t first = 0);

/// Mean of the block of length ceil(n/10) centred on the middle of values[first..].
double mid_run_mean(std::span<const double> values, std::size_t first = 0);

// ---------------------------------------------------------------------------
// Rates

struct RateReport {
  /// (F_{k+1} - F*) / (F_k - F*) while F_k - F* is above the numerical floor.
  std::vector<double> q_ratios;
  double tail_q_max = 0.0;
  /// Some ratio equals 1 (no progress).
  bool degenerate = false;
  std::vector<double> sublinear_scores;
  /// dist(x_k, X)^(1/k) for k >= 1, when the records carry distances.
  std::vector<double> r_linear_scores;
};

/// Gap floor below which Q-ratios are not formed.
inline constexpr double kGapFloor = 1e-14;

/// Throws UsageError("inconsistent F*") when some F_k < F* - 1e-12.
RateReport qlinear_ratio(const SolveReport& report, double F_star, std::size_t burn_in);

/// zeta = eta mu / (4M) if mu <= 2M, else 1 - M/mu.
double theorem_zeta(double eta, double mu, double M);

struct SublinearVerdict {
  std::vector<double> scores;
  DecayVerdict decay;
};

/// k (F_k - F*) for every record plus the final point.
SublinearVerdict sublinear_score(const SolveReport& report, double F_star);

/// Upper bounds on F_k - F* for k = 0..K (index K is the final point):
///   (M R0^2 + F_0 - F*) / sum_{i<k} alpha_i gamma eta,
/// with gamma dropped for LS2-4. Entry 0 is +inf.
std::vector<double> theorem2_bound(const SolveReport& report, double F_star, double M, double R0,
                                   double gamma, double eta, LineSearchVariant variant);

/// max_k dist(x_k, X) over the records.
std::optional<double> estimate_R0(const SolveReport& report);

/// Liminf floor on alpha_k under local L-smoothness, capped at alpha_bar.
double stepsize_floor(LineSearchVariant variant, double beta, double gamma, double alpha_bar,
                      double eta, double m, double L);

/// min_{k >= burn_in} alpha_k >= floor - 1e-12.
bool stepsize_floor_audit(const SolveReport& report, double floor, std::size_t burn_in);

// ---------------------------------------------------------------------------
// Abstract sequence lemma:
//   delta_{k+1} <= delta_k + c (-lambda_k delta_k + A_k lambda_k^2 / 2)

enum class RecursionVerdict { violated, hypothesis_holds, big_o_confirmed, little_o_confirmed };

std::string_view to_string(RecursionVerdict verdict);

struct RecursionReport {
  RecursionVerdict verdict = RecursionVerdict::violated;
  bool hypothesis_holds = false;
  std::optional<std::size_t> first_violation;
};

RecursionReport recursion_rate_check(std::span<const double> deltas,
                                     std::span<const double> lambdas,
                                     std::span<const double> As, double c);

// ---------------------------------------------------------------------------
// Growth conditions

struct GrowthSampling {
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  /// Sampling radius around P_X(x0); dist(x0, X) when unset.
  std::optional<double> radius;
};

/// min over sampled x of 2 (F(x) - F*) / dist(x, X)^2. One-dimensional
/// instances use an even grid instead of random draws.
double qg_estimate(const ProblemInstance& instance, const GrowthSampling& sampling);

struct OsscWitness {
  Vector x;
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Largest sampled violation of
///   F(l x + (1-l) P(x)) <= l F(x) + (1-l) F* - mu l (1-l)/2 |x - P(x)|^2.
std::optional<OsscWitness> ossc_violation_search(const ProblemInstance& instance, double mu,
                                                 const GrowthSampling& sampling);

/// Tail-decade mean of |d_k| against the head-decade mean.
DecayVerdict direction_decay_audit(const SolveReport& report);

// ---------------------------------------------------------------------------
// Lemma audits over a finished run. Uncertified iterations are skipped.

struct AuditResult {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::optional<std::size_t> first_violation;
  /// Largest lhs - rhs - slack seen (negative when every check passes).
  double worst_excess = -kInf;

  bool passed() const { return violations == 0; }
  void record(std::size_t k, double lhs, double rhs, double slack);
};

/// Absolute audit slack 1e-10 (1 + |F_k|).
double audit_slack(double F_k);

/// c1 = gamma eta / (2 (1 + sqrt(1 - eta))) for LS1, eta / (2 (1 + sqrt(1 - eta))) otherwise.
double sufficient_decrease_constant(LineSearchVariant variant, double gamma, double eta);

/// F_{k+1} - F_k <= -alpha_k c1 |d_k|_k^2
AuditResult audit_sufficient_decrease(const SolveReport& report, LineSearchVariant variant,
                                      double gamma, double eta);

/// F_{k+1} - F_k <= gamma alpha_k Q_k(xbar) (LS1), alpha_k Q_k(xbar) (LS2-4)
AuditResult audit_lemma2(const SolveReport& report, LineSearchVariant variant, double gamma);

/// Q_k(xbar) <= -eta / (2 (1 + sqrt(1 - eta))) |d_k|_k^2
AuditResult audit_model_decrease(const SolveReport& report, double eta);

/// sum_k alpha_k c1 |d_k|_k^2 <= F_0 - F* + 1e-8
AuditResult audit_summability(const SolveReport& report, LineSearchVariant variant, double gamma,
                              double eta, double F_star);

/// F_k - F* <= bound_k + 1e-10 for every k.
AuditResult audit_theorem2(const SolveReport& report, double F_star,
                           std::span<const double> bounds);

/// Q_k(y_l) - Q* <= (1 - sigma)^l (-Q*) (1 + 1e-9) for l <= l_max along the
/// prox-gradient trajectory of the model.
AuditResult audit_a4_contraction(const SubproblemModel& model, double Q_star, double sigma,
                                 std::size_t l_max);

/// Q_k(xbar) <= eta Q* + 1e-10.
bool certificate_sound(double Q_bar, double eta, double Q_star);

}  // namespace isqa
