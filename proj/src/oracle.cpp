#include "isqa/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "isqa/driver.hpp"
#include "isqa/inner.hpp"

namespace isqa {

namespace {

constexpr std::size_t kOracleMaxSteps = 1'000'000;

bool has_closed_form(const SubproblemModel& model) {
  return model.metric().is_diagonal() && model.objective().regularizer->separable();
}

}  // namespace

SubproblemSolution subproblem_oracle_iterative(const SubproblemModel& model, double tol) {
  if (!(tol > 0.0)) throw UsageError("subproblem_oracle: tol must be positive");
  const double tau = 1.0 / model.metric().spectral_max();
  SubproblemSolution out;
  out.minimizer = model.anchor();
  out.Q_star = 0.0;

  Vector y = model.anchor();
  for (std::size_t l = 1; l <= kOracleMaxSteps; ++l) {
    Vector next = prox_grad_step(model, y, tau);
    const Vector xi = subgrad_residual(model, y, next, tau);
    const double q = model.Q(next);
    if (q < out.Q_star) {
      out.Q_star = q;
      out.minimizer = next;
    }
    out.iterations = l;
    if (certificate_gap_bound(model, xi) <= tol) {
      // next is within tol of the minimum; so is the best value seen
      return out;
    }
    y = std::move(next);
  }
  throw OracleFailure(fmt::format("subproblem oracle did not reach gap bound {} within {} steps",
                                  tol, kOracleMaxSteps));
}

SubproblemSolution subproblem_oracle(const SubproblemModel& model, double tol) {
  if (!(tol > 0.0)) throw UsageError("subproblem_oracle: tol must be positive");
  if (!has_closed_form(model)) return subproblem_oracle_iterative(model, tol);

  // min_u <grad_i, u - x_i> + g_i(u) + h_i/2 (u - x_i)^2 is prox_{g_i/h_i}(x_i - grad_i/h_i)
  const Vector h = model.metric().diagonal_entries();
  const Vector shifted = model.anchor() - (model.grad_at_anchor().array() / h.array()).matrix();
  const Vector taus = h.cwiseInverse();
  SubproblemSolution out;
  out.closed_form = true;
  out.minimizer = model.objective().regularizer->prox_weighted(shifted, taus);
  out.Q_star = model.Q(out.minimizer);
  if (!(out.Q_star <= 0.0)) {
    out.minimizer = model.anchor();
    out.Q_star = 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct PathResult {
  Vector x;
  double F = 0.0;
};

PathResult driver_reference(const ProblemInstance& instance, double L) {
  SolverConfig config;
  config.name = "reference";
  config.problem = instance;
  config.metric_policy = MetricPolicy::scaled_identity(1.0 / L);
  config.inexactness = InexactnessPolicy::near_exact(1.0, 1e-14);
  config.linesearch = LineSearchSpec{LineSearchVariant::ls3, 0.5, 0.5, 1.0, 200};
  config.max_outer = 500'000;
  config.tol_direction = 1e-10;
  const SolveReport report = sqa_run(config);
  if (report.termination_reason == TerminationReason::error) {
    throw OracleFailure(fmt::format("reference run on '{}' failed: {}", instance.name,
                                    report.error_message));
  }
  if (report.termination_reason != TerminationReason::direction_tolerance) {
    throw OracleFailure(fmt::format("reference run on '{}' did not converge", instance.name));
  }
  return {report.final_point, report.final_F};
}

// Accelerated proximal gradient with function-value restart.
PathResult accelerated_reference(const ProblemInstance& instance, double L) {
  const ObjectiveSplit& obj = instance.objective;
  const double step = 1.0 / L;
  Vector x = instance.x0;
  Vector y = x;
  double t = 1.0;
  double Fx = eval_F(obj, x);
  for (std::size_t it = 0; it < kOracleMaxSteps; ++it) {
    const Vector next = obj.regularizer->prox(y - step * obj.smooth->gradient(y), step);
    const double F_next = eval_F(obj, next);
    const double move = L * (next - y).norm();
    if (F_next > Fx) {
      // a plain step from x that fails to descend means x is converged up to rounding
      if (t == 1.0) return {x, Fx};
      // restart momentum from the last accepted point
      y = x;
      t = 1.0;
      continue;
    }
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    y = next + ((t - 1.0) / t_next) * (next - x);
    x = next;
    Fx = F_next;
    t = t_next;
    if (move <= 1e-12) return {x, Fx};
  }
  throw OracleFailure(fmt::format("accelerated reference on '{}' did not converge", instance.name));
}

}  // namespace

ReferenceSolution reference_solution(const ProblemInstance& instance, double tol) {
  if (!(tol > 0.0)) throw UsageError("reference_solution: tol must be positive");
  ReferenceSolution out;
  if (instance.closed_form_minimizer && instance.known_F_star && instance.known_projector) {
    out.x_star = (*instance.known_projector)(instance.x0);
    out.F_star = *instance.known_F_star;
    out.F_check = eval_F(instance.objective, out.x_star);
    out.disagreement = std::abs(out.F_star - out.F_check);
    out.method = "closed-form";
    if (out.disagreement > 10.0 * tol) {
      throw ReferenceInconsistency(fmt::format(
          "closed-form F* for '{}' disagrees with F(x*) by {}", instance.name, out.disagreement));
    }
    return out;
  }
  if (instance.fixture_only) {
    throw UsageError(fmt::format("'{}' has no numeric reference", instance.name));
  }
  if (!instance.known_local_L || !(*instance.known_local_L > 0.0)) {
    throw UsageError(fmt::format("'{}' carries no Lipschitz constant for a reference run",
                                 instance.name));
  }
  const double L = *instance.known_local_L;
  const PathResult a = driver_reference(instance, L);
  const PathResult b = accelerated_reference(instance, L);
  out.x_star = a.x;
  out.F_star = std::min(a.F, b.F);
  out.F_check = std::max(a.F, b.F);
  out.disagreement = std::abs(a.F - b.F);
  out.method = "forward-backward+accelerated";
  if (out.disagreement > 10.0 * tol) {
    throw ReferenceInconsistency(fmt::format("references for '{}' disagree: {:.17g} vs {:.17g}",
                                             instance.name, a.F, b.F));
  }
  if (a.F > b.F) out.x_star = b.x;
  if (instance.known_F_star && std::abs(*instance.known_F_star - out.F_star) > 10.0 * tol) {
    throw ReferenceInconsistency(fmt::format("numeric F* {:.17g} for '{}' misses the planted {:.17g}",
                                             out.F_star, instance.name, *instance.known_F_star));
  }
  return out;
}

double prox_check_1d(const Regularizer& g, double v, double tau, double grid_halfwidth, double step) {
  if (!(step > 0.0)) throw UsageError("prox_check_1d: step must be positive");
  if (!(grid_halfwidth > step)) throw UsageError("prox_check_1d: grid narrower than one step");
  const auto count = static_cast<std::size_t>(std::floor(2.0 * grid_halfwidth / step)) + 1;
  Vector u(1);
  std::size_t best = 0;
  double best_value = kInf;
  for (std::size_t i = 0; i < count; ++i) {
    u(0) = v - grid_halfwidth + static_cast<double>(i) * step;
    const double value = tau * g.value(u) + 0.5 * (u(0) - v) * (u(0) - v);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  if (best == 0 || best + 1 == count) {
    throw UsageError(fmt::format("prox_check_1d: grid minimizer on the boundary; widen the grid "
                                 "beyond halfwidth {}",
                                 grid_halfwidth));
  }
  Vector vv(1);
  vv(0) = v;
  const double grid_min = v - grid_halfwidth + static_cast<double>(best) * step;
  return std::abs(g.prox(vv, tau)(0) - grid_min);
}

// ---------------------------------------------------------------------------

const std::vector<FixtureKey>& default_fixture_keys() {
  static const std::vector<FixtureKey> keys = {
      {"sc-quadratic-l1", 5, 42},  {"sc-quadratic-l1", 20, 1}, {"sc-quadratic-l1", 20, 2},
      {"sc-quadratic-l1", 20, 3},  {"logistic-l1", 10, 1},     {"logistic-l1", 10, 2},
      {"logistic-l1", 10, 3},      {"fbs-reference", 10, 1},   {"fbs-reference", 10, 2},
      {"fbs-reference", 10, 3},
  };
  return keys;
}

std::vector<FixtureRecord> compute_fixtures(const std::vector<FixtureKey>& keys, double tol) {
  std::vector<FixtureRecord> out;
  out.reserve(keys.size());
  for (const auto& key : keys) {
    const ProblemInstance inst = catalog_instantiate(key.instance, key.dimension, key.seed);
    const ReferenceSolution ref = reference_solution(inst, tol);
    out.push_back({key.instance, key.seed, key.dimension, ref.F_star, tol, ref.x_star});
  }
  return out;
}

void write_fixtures(const std::filesystem::path& path, const std::vector<FixtureRecord>& records) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  os << kFixtureHeader << '\n';
  os << "instance\tseed\tdimension\tF_star\ttol\tx_star\n";
  for (const auto& r : records) {
    std::string xs;
    for (Eigen::Index i = 0; i < r.x_star.size(); ++i) {
      if (i) xs += ',';
      xs += fmt::format("{:.17g}", r.x_star(i));
    }
    os << fmt::format("{}\t{}\t{}\t{:.17g}\t{}\t{}\n", r.instance, r.seed, r.dimension,
                      r.F_star, r.tol, xs);
  }
  if (!os) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
}

std::vector<FixtureRecord> read_fixtures(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError(fmt::format("cannot open fixture file {}", path.string()));
  std::string line;
  if (!std::getline(is, line) || line != kFixtureHeader) {
    throw UsageError(fmt::format("{}: missing '{}' header", path.string(), kFixtureHeader));
  }
  std::getline(is, line);  // column names
  std::vector<FixtureRecord> out;
  std::size_t lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    FixtureRecord r;
    std::string seed, dim, F, tol, xs;
    if (!std::getline(fields, r.instance, '\t') || !std::getline(fields, seed, '\t') ||
        !std::getline(fields, dim, '\t') || !std::getline(fields, F, '\t') ||
        !std::getline(fields, tol, '\t') || !std::getline(fields, xs)) {
      throw UsageError(fmt::format("{}:{}: expected 6 tab-separated fields", path.string(), lineno));
    }
    try {
      r.seed = std::stoull(seed);
      r.dimension = std::stoul(dim);
      r.F_star = std::stod(F);
      r.tol = std::stod(tol);
      std::vector<double> coords;
      std::istringstream cs(xs);
      std::string c;
      while (std::getline(cs, c, ',')) coords.push_back(std::stod(c));
      r.x_star = Eigen::Map<const Vector>(coords.data(), static_cast<Eigen::Index>(coords.size()));
    } catch (const std::exception&) {
      throw UsageError(fmt::format("{}:{}: malformed number", path.string(), lineno));
    }
    if (static_cast<std::size_t>(r.x_star.size()) != r.dimension) {
      throw UsageError(fmt::format("{}:{}: x_star has {} entries, dimension is {}", path.string(),
                                   lineno, r.x_star.size(), r.dimension));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::optional<FixtureRecord> find_fixture(const std::vector<FixtureRecord>& records,
                                          const std::string& instance, std::size_t dimension,
                                          std::uint64_t seed) {
  for (const auto& r : records) {
    if (r.instance == instance && r.dimension == dimension && r.seed == seed) return r;
  }
  return std::nullopt;
}

void attach_reference(ProblemInstance& instance, const FixtureRecord& record) {
  if (record.instance != instance.name || record.seed != instance.seed ||
      record.dimension != instance.objective.dimension) {
    throw UsageError(fmt::format("fixture {} (n={}, seed {}) does not match instance {}",
                                 record.instance, record.dimension, record.seed, instance.name));
  }
  instance.known_F_star = record.F_star;
  if (instance.unique_minimizer) {
    const Vector x_star = record.x_star;
    instance.known_projector = Projector([x_star](const Vector&) { return x_star; });
  }
}

}  // namespace isqa
