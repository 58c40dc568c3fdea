#pragma once

#include <cstddef>
#include <string_view>

#include "isqa/core.hpp"

namespace isqa {

enum class LineSearchVariant { ls1, ls2, ls3, ls4 };

std::string_view to_string(LineSearchVariant variant);
LineSearchVariant parse_linesearch_variant(std::string_view text);

struct LineSearchSpec {
  LineSearchVariant variant = LineSearchVariant::ls3;
  double beta = 0.5;
  double gamma = 0.5;
  double alpha_bar = 1.0;
  std::size_t max_trials = 200;

  /// Checks the variant's parameter ranges; LS2 needs the metric lower
  /// bound m because gamma must lie in (0, m/2).
  void validate(double metric_m) const;
};

struct LineSearchOutcome {
  double alpha = 0.0;
  std::size_t trials = 0;
  double accepted_condition_lhs = 0.0;
  double accepted_condition_rhs = 0.0;
};

/// Absolute slack on every acceptance inequality.
inline constexpr double kLineSearchSlack = 1e-12;

struct ConditionCheck {
  bool accepted = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Evaluates the variant's acceptance inequality at trial step alpha along
/// d = x_bar - x_k. LS2 is tested in the alpha-cancelled form
///   |grad f(x_k + alpha d) - grad f(x_k)| <= gamma |d|.
ConditionCheck ls_condition(LineSearchVariant variant, const ObjectiveSplit& obj,
                            const SubproblemModel& model, const Vector& x_bar, double alpha,
                            double gamma);

/// Largest alpha in {alpha_bar, alpha_bar beta, ...} passing ls_condition.
/// Throws LineSearchFailure when the trial budget runs out.
LineSearchOutcome backtrack(const LineSearchSpec& spec, const ObjectiveSplit& obj,
                            const SubproblemModel& model, const Vector& x_bar);

}  // namespace isqa
