#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isqa/core.hpp"
#include "isqa/problems.hpp"

namespace isqa {

class ReferenceInconsistency : public OracleFailure {
 public:
  using OracleFailure::OracleFailure;
};

struct SubproblemSolution {
  Vector minimizer;
  double Q_star = 0.0;
  std::size_t iterations = 0;
  bool closed_form = false;
};

/// Coordinatewise prox when the metric is diagonal and g separable,
/// prox-gradient at tau = 1/M otherwise. Q_star is an attained value within
/// tol of the true minimum. Throws OracleFailure after 10^6 steps.
SubproblemSolution subproblem_oracle(const SubproblemModel& model, double tol);

/// Always the iterative route, for cross-checking the closed form.
SubproblemSolution subproblem_oracle_iterative(const SubproblemModel& model, double tol);

struct ReferenceSolution {
  Vector x_star;
  double F_star = 0.0;
  /// F* from the independent second method, and |F_a - F_b|.
  double F_check = 0.0;
  double disagreement = 0.0;
  std::string method;
};

/// Closed form where the instance has one; otherwise the driver in
/// forward-backward mode cross-checked by restarted accelerated proximal
/// gradient. Disagreement above 10 tol throws ReferenceInconsistency.
ReferenceSolution reference_solution(const ProblemInstance& instance, double tol = 1e-12);

/// |prox(v, tau) - grid argmin of tau g(u) + (u - v)^2 / 2| over
/// u in [v - halfwidth, v + halfwidth]. Throws UsageError when the grid
/// argmin sits on the boundary.
double prox_check_1d(const Regularizer& g, double v, double tau, double grid_halfwidth, double step);

// ---------------------------------------------------------------------------
// Fixtures

struct FixtureRecord {
  std::string instance;
  std::uint64_t seed = 0;
  std::size_t dimension = 0;
  double F_star = 0.0;
  double tol = 0.0;
  Vector x_star;

  bool operator==(const FixtureRecord&) const = default;
};

struct FixtureKey {
  std::string instance;
  std::size_t dimension = 0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kFixtureHeader = "# isqa-fixtures v1";

/// Instances the test suite and CLI expect to find fixtures for.
const std::vector<FixtureKey>& default_fixture_keys();

std::vector<FixtureRecord> compute_fixtures(const std::vector<FixtureKey>& keys, double tol = 1e-12);

void write_fixtures(const std::filesystem::path& path, const std::vector<FixtureRecord>& records);
std::vector<FixtureRecord> read_fixtures(const std::filesystem::path& path);

std::optional<FixtureRecord> find_fixture(const std::vector<FixtureRecord>& records,
                                          const std::string& instance, std::size_t dimension,
                                          std::uint64_t seed);

/// Sets known_F_star and, for unique minimizers, a constant projector.
void attach_reference(ProblemInstance& instance, const FixtureRecord& record);

}  // namespace isqa
