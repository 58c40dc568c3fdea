#include "isqa/linesearch.hpp"

#include <fmt/format.h>

#include <cmath>

namespace isqa {

std::string_view to_string(LineSearchVariant variant) {
  switch (variant) {
    case LineSearchVariant::ls1:
      return "LS1";
    case LineSearchVariant::ls2:
      return "LS2";
    case LineSearchVariant::ls3:
      return "LS3";
    case LineSearchVariant::ls4:
      return "LS4";
  }
  return "?";
}

LineSearchVariant parse_linesearch_variant(std::string_view text) {
  if (text == "LS1" || text == "ls1") return LineSearchVariant::ls1;
  if (text == "LS2" || text == "ls2") return LineSearchVariant::ls2;
  if (text == "LS3" || text == "ls3") return LineSearchVariant::ls3;
  if (text == "LS4" || text == "ls4") return LineSearchVariant::ls4;
  throw UsageError(fmt::format("unknown line search variant '{}'", text));
}

void LineSearchSpec::validate(double metric_m) const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw UsageError(fmt::format("linesearch.beta must lie in (0, 1) (got {})", beta));
  }
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) {
    throw UsageError(fmt::format("linesearch.alpha_bar must lie in (0, 1] (got {})", alpha_bar));
  }
  if (max_trials == 0) throw UsageError("linesearch.max_trials must be at least 1");
  if (variant == LineSearchVariant::ls2) {
    if (!(gamma > 0.0 && gamma < metric_m / 2.0)) {
      throw UsageError(fmt::format("ls2.gamma must lie in (0, m/2) = (0, {})", metric_m / 2.0));
    }
  } else if (!(gamma > 0.0 && gamma < 1.0)) {
    throw UsageError(fmt::format("linesearch.gamma must lie in (0, 1) (got {})", gamma));
  }
}

namespace {

void require_finite(double value, const char* what, double alpha) {
  if (!std::isfinite(value)) {
    throw NumericalError(fmt::format("line search: {} is not finite at alpha = {}", what, alpha));
  }
}

}  // namespace

ConditionCheck ls_condition(LineSearchVariant variant, const ObjectiveSplit& obj,
                            const SubproblemModel& model, const Vector& x_bar, double alpha,
                            double gamma) {
  const Vector d = x_bar - model.anchor();
  const Vector trial = model.anchor() + alpha * d;
  ConditionCheck check;

  switch (variant) {
    case LineSearchVariant::ls1: {
      const double F_trial = eval_F(obj, trial);
      require_finite(F_trial, "F(trial)", alpha);
      check.lhs = F_trial - model.F_at_anchor();
      check.rhs = gamma * alpha * model.Delta(x_bar);
      break;
    }
    case LineSearchVariant::ls2: {
      const Vector g_trial = obj.smooth->gradient(trial);
      if (!all_finite(g_trial)) {
        throw NumericalError(fmt::format("line search: grad f(trial) is not finite at alpha = {}", alpha));
      }
      check.lhs = (g_trial - model.grad_at_anchor()).norm();
      check.rhs = gamma * d.norm();
      break;
    }
    case LineSearchVariant::ls3: {
      const double F_trial = eval_F(obj, trial);
      require_finite(F_trial, "F(trial)", alpha);
      check.lhs = F_trial - model.F_at_anchor();
      check.rhs = alpha * (model.Delta(x_bar) + 0.5 * gamma * metric_norm_sq(model.metric(), d));
      break;
    }
    case LineSearchVariant::ls4: {
      const double f_trial = obj.smooth->value(trial);
      require_finite(f_trial, "f(trial)", alpha);
      check.lhs = f_trial - model.f_at_anchor();
      check.rhs = alpha * (model.grad_at_anchor().dot(d) +
                           0.5 * gamma * metric_norm_sq(model.metric(), d));
      break;
    }
  }
  require_finite(check.rhs, "acceptance bound", alpha);
  check.accepted = check.lhs <= check.rhs + kLineSearchSlack;
  return check;
}

LineSearchOutcome backtrack(const LineSearchSpec& spec, const ObjectiveSplit& obj,
                            const SubproblemModel& model, const Vector& x_bar) {
  LineSearchOutcome outcome;
  if (x_bar == model.anchor()) {
    outcome.alpha = spec.alpha_bar;
    outcome.trials = 1;
    return outcome;
  }
  for (std::size_t trial = 1; trial <= spec.max_trials; ++trial) {
    const double alpha = spec.alpha_bar * std::pow(spec.beta, static_cast<double>(trial - 1));
    const ConditionCheck check = ls_condition(spec.variant, obj, model, x_bar, alpha, spec.gamma);
    if (check.accepted) {
      outcome.alpha = alpha;
      outcome.trials = trial;
      outcome.accepted_condition_lhs = check.lhs;
      outcome.accepted_condition_rhs = check.rhs;
      return outcome;
    }
  }
  throw LineSearchFailure(fmt::format(
      "{} exhausted {} backtracking trials; a step always exists for a correct gradient oracle, "
      "so this points to an oracle bug or numerical breakdown",
      to_string(spec.variant), spec.max_trials));
}

}  // namespace isqa
