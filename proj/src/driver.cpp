#include "isqa/driver.hpp"

#include <fmt/format.h>

#include <cmath>
#include <exception>

namespace isqa {

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::direction_tolerance:
      return "direction-tolerance";
    case TerminationReason::fgap_tolerance:
      return "fgap-tolerance";
    case TerminationReason::max_outer:
      return "max-outer";
    case TerminationReason::error:
      return "error";
  }
  return "?";
}

double policy_sigma(const MetricPolicy& policy) { return policy.m / policy.M; }

void SolverConfig::validate() const {
  if (problem.fixture_only) {
    throw UsageError(fmt::format("problem '{}' is an evaluation fixture and cannot be solved",
                                 problem.name));
  }
  if (static_cast<std::size_t>(problem.x0.size()) != problem.objective.dimension) {
    throw UsageError("problem.x0 does not match the problem dimension");
  }
  metric_policy.validate();
  inexactness.validate();
  const double eta = inexactness.effective_eta();
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw UsageError(fmt::format("inexactness.eta must lie in (0, 1] (got {})", eta));
  }
  if (inexactness.sigma > policy_sigma(metric_policy) * (1.0 + 1e-12)) {
    throw UsageError(fmt::format("inexactness.sigma = {} exceeds m/M = {} of the metric policy",
                                 inexactness.sigma, policy_sigma(metric_policy)));
  }
  linesearch.validate(metric_policy.m);
  if (!(tol_direction >= 0.0)) throw UsageError("tol_direction must be nonnegative");
  if (tol_fgap && !(*tol_fgap >= 0.0)) throw UsageError("tol_fgap must be nonnegative");
}

double SolveReport::F_after(std::size_t i) const {
  return i + 1 < records.size() ? records[i + 1].F_k : final_F;
}

SolverState initial_state(const SolverConfig& config) {
  SolverState state{config.problem.x0, 0.0, 0, MetricHistory(history_capacity(config.metric_policy))};
  state.F = eval_F(config.problem.objective, state.x);
  if (!std::isfinite(state.F)) throw UsageError("x0 lies outside dom g");
  return state;
}

std::pair<SolverState, IterationRecord> sqa_step(SolverState state, const SolverConfig& config,
                                                 const StepObserver& observer) {
  const ProblemInstance& problem = config.problem;
  const ObjectiveSplit& obj = problem.objective;

  if (history_capacity(config.metric_policy) > 0) {
    state.history.push(state.x, obj.smooth->gradient(state.x));
  }
  const Metric metric = next_metric(config.metric_policy, state.history, obj.dimension);
  const SubproblemModel model = make_subproblem(obj, metric, state.x);
  const InnerResult inner = inner_solve(model, config.inexactness);
  const LineSearchOutcome ls = backtrack(config.linesearch, obj, model, inner.candidate);

  const Vector d = inner.candidate - state.x;
  Vector next = state.x + ls.alpha * d;
  const double next_F = eval_F(obj, next);
  if (!std::isfinite(next_F)) {
    throw NumericalError(fmt::format("sqa_step: F(x_{}) is not finite", state.k + 1));
  }

  IterationRecord record;
  record.k = state.k;
  record.F_k = model.F_at_anchor();
  record.alpha_k = ls.alpha;
  record.dir_norm = d.norm();
  record.dir_norm_metric = std::sqrt(metric_norm_sq(metric, d));
  record.Q_bar = inner.Q_value;
  record.inner_iters = inner.iterations_used;
  record.certified = inner.certified;
  record.ls_trials = ls.trials;
  if (problem.known_projector) {
    record.dist_to_X = (state.x - (*problem.known_projector)(state.x)).norm();
  }
  if (problem.known_F_star) record.fgap = record.F_k - *problem.known_F_star;

  if (observer) observer(StepDetail{state.k, model, inner, ls, next, next_F});

  state.x = std::move(next);
  state.F = next_F;
  ++state.k;
  return {std::move(state), record};
}

std::optional<TerminationReason> termination_check(const IterationRecord& record,
                                                   const SolverConfig& config) {
  if (record.fgap && config.tol_fgap && *record.fgap <= *config.tol_fgap) {
    return TerminationReason::fgap_tolerance;
  }
  if (record.dir_norm_metric <= config.tol_direction) return TerminationReason::direction_tolerance;
  if (record.k + 1 >= config.max_outer) return TerminationReason::max_outer;
  return std::nullopt;
}

SolveReport sqa_run(const SolverConfig& config, const StepObserver& observer) {
  config.validate();
  SolveReport report;
  SolverState state = initial_state(config);
  report.final_point = state.x;
  report.final_F = state.F;
  if (config.max_outer == 0) {
    report.termination_reason = TerminationReason::max_outer;
    return report;
  }
  while (true) {
    IterationRecord record;
    try {
      auto [next, rec] = sqa_step(std::move(state), config, observer);
      state = std::move(next);
      record = rec;
    } catch (const std::exception& e) {
      report.termination_reason = TerminationReason::error;
      report.error_message = e.what();
      return report;
    }
    report.records.push_back(record);
    report.total_inner_iterations += record.inner_iters;
    report.final_point = state.x;
    report.final_F = state.F;
    if (auto reason = termination_check(record, config)) {
      report.termination_reason = *reason;
      return report;
    }
  }
}

}  // namespace isqa
