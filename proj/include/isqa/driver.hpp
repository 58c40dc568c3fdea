#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isqa/core.hpp"
#include "isqa/inner.hpp"
#include "isqa/linesearch.hpp"
#include "isqa/metric_policy.hpp"
#include "isqa/problems.hpp"

namespace isqa {

struct SolverConfig {
  std::string name;
  ProblemInstance problem;
  MetricPolicy metric_policy;
  InexactnessPolicy inexactness;
  LineSearchSpec linesearch;
  std::size_t max_outer = 1000;
  double tol_direction = 0.0;
  std::optional<double> tol_fgap;
  std::uint64_t seed = 0;

  /// Cross-field checks: LS2 gamma < m/2, alpha_bar in (0,1], eta in (0,1],
  /// sigma no larger than m/M.
  void validate() const;
};

/// sigma = m/M, the prox-gradient contraction certified by the policy bounds.
double policy_sigma(const MetricPolicy& policy);

/// One outer iteration: the step from x_k to x_{k+1}. F_k, dist_to_X and
/// fgap are measured at x_k.
struct IterationRecord {
  std::size_t k = 0;
  double F_k = 0.0;
  double alpha_k = 0.0;
  double dir_norm = 0.0;
  double dir_norm_metric = 0.0;
  double Q_bar = 0.0;
  std::size_t inner_iters = 0;
  bool certified = false;
  std::size_t ls_trials = 0;
  std::optional<double> dist_to_X;
  std::optional<double> fgap;

  bool operator==(const IterationRecord&) const = default;
};

enum class TerminationReason { direction_tolerance, fgap_tolerance, max_outer, error };

std::string_view to_string(TerminationReason reason);

struct SolveReport {
  Vector final_point;
  double final_F = 0.0;
  std::vector<IterationRecord> records;
  TerminationReason termination_reason = TerminationReason::max_outer;
  std::size_t total_inner_iterations = 0;
  std::string error_message;

  /// F at the start of record i, with F(final_point) after the last record.
  double F_after(std::size_t i) const;
};

struct SolverState {
  Vector x;
  double F = 0.0;
  std::size_t k = 0;
  MetricHistory history;
};

/// Everything a step produced, for audits that need more than the record.
struct StepDetail {
  std::size_t k;
  const SubproblemModel& model;
  const InnerResult& inner;
  const LineSearchOutcome& linesearch;
  const Vector& next_point;
  double next_F;
};

using StepObserver = std::function<void(const StepDetail&)>;

SolverState initial_state(const SolverConfig& config);

/// next_metric -> make_subproblem -> inner_solve -> backtrack -> update.
std::pair<SolverState, IterationRecord> sqa_step(SolverState state, const SolverConfig& config,
                                                 const StepObserver& observer = {});

/// First satisfied criterion in the order fgap, direction, budget.
std::optional<TerminationReason> termination_check(const IterationRecord& record,
                                                   const SolverConfig& config);

SolveReport sqa_run(const SolverConfig& config, const StepObserver& observer = {});

}  // namespace isqa
