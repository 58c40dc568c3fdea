#include "isqa/benchmark.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "isqa/diagnostics.hpp"
#include "isqa/inner.hpp"
#include "isqa/trace.hpp"

namespace isqa {

std::string_view to_string(AuditStatus status) {
  switch (status) {
    case AuditStatus::passed:
      return "pass";
    case AuditStatus::failed:
      return "fail";
    case AuditStatus::skipped:
      return "skipped";
  }
  return "?";
}

void attach_fixture_if_missing(RunSpec& spec, const std::vector<FixtureRecord>& fixtures) {
  ProblemInstance& p = spec.solver.problem;
  const bool missing = !p.known_F_star || (p.unique_minimizer && !p.known_projector);
  if (!missing) return;
  if (auto rec = find_fixture(fixtures, p.name, p.objective.dimension, p.seed)) {
    attach_reference(p, *rec);
  }
}

namespace {

AuditOutcome from_result(AuditKind kind, const AuditResult& r) {
  AuditOutcome out{kind, r.passed() ? AuditStatus::passed : AuditStatus::failed, ""};
  if (r.passed()) {
    out.detail = fmt::format("{} checks", r.checked);
  } else {
    out.detail = fmt::format("{} of {} checks violated, first at k={}, worst excess {:.3e}",
                             r.violations, r.checked, *r.first_violation, r.worst_excess);
  }
  return out;
}

AuditOutcome skipped(AuditKind kind, std::string why) {
  return {kind, AuditStatus::skipped, std::move(why)};
}

AuditOutcome a4_audit(const RunSpec& spec, const std::vector<SubproblemModel>& models) {
  if (models.empty()) return skipped(AuditKind::a4, "no subproblem snapshots");
  const InexactnessPolicy& policy = spec.solver.inexactness;
  const double eta = policy.effective_eta();
  std::size_t checked = 0;
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const SubproblemModel& model = models[i];
    const SubproblemSolution sol = subproblem_oracle(model, 1e-12);
    if (sol.Q_star > -1e-14) continue;  // anchor already optimal
    const AuditResult contraction = audit_a4_contraction(model, sol.Q_star, policy.sigma, 50);
    checked += contraction.checked;
    if (!contraction.passed()) {
      problems.push_back(fmt::format("contraction fails at k={}, l={}", i, *contraction.first_violation));
    }
    const InnerResult inner = inner_solve(model, policy);
    ++checked;
    if (inner.certified && !certificate_sound(inner.Q_value, eta, sol.Q_star)) {
      problems.push_back(fmt::format("k={}: Q(xbar) = {:.6e} above eta Q* = {:.6e}", i,
                                     inner.Q_value, eta * sol.Q_star));
    }
  }
  if (problems.empty()) return {AuditKind::a4, AuditStatus::passed, fmt::format("{} checks", checked)};
  std::string detail = problems.front();
  if (problems.size() > 1) detail += fmt::format(" (+{} more)", problems.size() - 1);
  return {AuditKind::a4, AuditStatus::failed, detail};
}

}  // namespace

std::vector<AuditOutcome> run_audits(const RunSpec& spec, const SolveReport& report,
                                     const std::vector<SubproblemModel>& models) {
  const SolverConfig& c = spec.solver;
  const LineSearchSpec& ls = c.linesearch;
  const double eta = c.inexactness.effective_eta();
  const ProblemInstance& p = c.problem;

  std::vector<AuditOutcome> out;
  for (AuditKind kind : spec.audits) {
    try {
      switch (kind) {
        case AuditKind::lemma3: {
          AuditResult r = audit_sufficient_decrease(report, ls.variant, ls.gamma, eta);
          const AuditResult model = audit_model_decrease(report, eta);
          r.checked += model.checked;
          r.violations += model.violations;
          if (!r.first_violation) r.first_violation = model.first_violation;
          r.worst_excess = std::max(r.worst_excess, model.worst_excess);
          out.push_back(from_result(kind, r));
          break;
        }
        case AuditKind::lemma2:
          out.push_back(from_result(kind, audit_lemma2(report, ls.variant, ls.gamma)));
          break;
        case AuditKind::thm2_bound: {
          const auto R0 = estimate_R0(report);
          if (!p.known_F_star || !R0) {
            out.push_back(skipped(kind, "needs known F* and distances to the solution set"));
            break;
          }
          const auto bounds = theorem2_bound(report, *p.known_F_star, c.metric_policy.M, *R0,
                                             ls.gamma, eta, ls.variant);
          out.push_back(from_result(kind, audit_theorem2(report, *p.known_F_star, bounds)));
          break;
        }
        case AuditKind::floor: {
          if (!p.known_local_L || report.records.size() < 2) {
            out.push_back(skipped(kind, "needs a Lipschitz constant and at least two iterations"));
            break;
          }
          const double floor = stepsize_floor(ls.variant, ls.beta, ls.gamma, ls.alpha_bar, eta,
                                              c.metric_policy.m, *p.known_local_L);
          const bool ok = stepsize_floor_audit(report, floor, report.records.size() / 2);
          out.push_back({kind, ok ? AuditStatus::passed : AuditStatus::failed,
                         fmt::format("floor {:.6g}", floor)});
          break;
        }
        case AuditKind::a4:
          out.push_back(a4_audit(spec, models));
          break;
      }
    } catch (const std::exception& e) {
      out.push_back({kind, AuditStatus::failed, e.what()});
    }
  }
  return out;
}

bool RunOutcome::ok() const {
  if (error) return false;
  for (const auto& a : audits) {
    if (a.status == AuditStatus::failed) return false;
  }
  return true;
}

RunOutcome execute_run(const RunSpec& spec) {
  RunOutcome out;
  out.name = spec.solver.name;
  std::vector<SubproblemModel> models;
  const bool want_a4 =
      std::find(spec.audits.begin(), spec.audits.end(), AuditKind::a4) != spec.audits.end();
  StepObserver observer;
  if (want_a4) {
    observer = [&models](const StepDetail& d) {
      if (d.k < kA4Snapshots) models.push_back(d.model);
    };
  }
  try {
    out.report = sqa_run(spec.solver, observer);
  } catch (const std::exception& e) {
    out.error = e.what();
    return out;
  }
  if (out.report.termination_reason == TerminationReason::error) {
    out.error = out.report.error_message;
  }
  out.audits = run_audits(spec, out.report, models);
  return out;
}

nlohmann::json summarize(const RunSpec& spec, const RunOutcome& outcome) {
  const SolverConfig& c = spec.solver;
  const SolveReport& r = outcome.report;
  nlohmann::json j;
  j["name"] = outcome.name;
  j["instance"] = spec.instance;
  j["dimension"] = spec.dimension;
  j["seed"] = c.seed;
  j["metric"] = std::string(to_string(c.metric_policy.kind));
  j["inner_mode"] = std::string(to_string(c.inexactness.mode));
  j["eta"] = c.inexactness.effective_eta();
  j["linesearch"] = std::string(to_string(c.linesearch.variant));
  j["termination"] = std::string(to_string(r.termination_reason));
  j["iterations"] = r.records.size();
  j["final_F"] = r.final_F;
  j["total_inner_iterations"] = r.total_inner_iterations;

  std::size_t uncertified = 0;
  std::size_t ls_trials = 0;
  for (const auto& rec : r.records) {
    if (!rec.certified) ++uncertified;
    ls_trials += rec.ls_trials;
  }
  j["uncertified_iterations"] = uncertified;
  j["line_search_trials"] = ls_trials;

  if (c.problem.known_F_star && !r.records.empty()) {
    const double F_star = *c.problem.known_F_star;
    j["final_fgap"] = r.final_F - F_star;
    try {
      const RateReport rate = qlinear_ratio(r, F_star, r.records.size() / 5);
      j["tail_q_max"] = rate.tail_q_max;
      const SublinearVerdict sub = sublinear_score(r, F_star);
      j["sublinear_decay"] = sub.decay.pass;
    } catch (const std::exception& e) {
      j["rate_error"] = e.what();
    }
  }
  const DecayVerdict dir = direction_decay_audit(r);
  j["direction_decay"] = dir.insufficient_data ? "insufficient-data" : (dir.pass ? "pass" : "fail");

  nlohmann::json audits = nlohmann::json::object();
  for (const auto& a : outcome.audits) {
    audits[std::string(to_string(a.kind))] = {{"status", std::string(to_string(a.status))},
                                              {"detail", a.detail}};
  }
  j["audits"] = audits;
  j["error"] = outcome.error ? nlohmann::json(*outcome.error) : nlohmann::json(nullptr);
  return j;
}

BenchmarkResult run_benchmark(std::vector<RunSpec> specs, const std::filesystem::path& out_dir,
                              const BenchmarkOptions& options) {
  std::filesystem::create_directories(out_dir);
  for (auto& spec : specs) {
    if (options.audits) spec.audits = *options.audits;
    attach_fixture_if_missing(spec, options.fixtures);
  }

  BenchmarkResult result;
  result.outcomes.resize(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      RunOutcome outcome = execute_run(specs[i]);
      try {
        emit_trace(outcome.report, out_dir / (outcome.name + ".csv"));
      } catch (const std::exception& e) {
        if (!outcome.error) outcome.error = e.what();
      }
      outcome.summary = summarize(specs[i], outcome);
      result.outcomes[i] = std::move(outcome);
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, specs.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::ofstream summary(out_dir / "summary.jsonl");
  if (!summary) {
    throw std::runtime_error(fmt::format("cannot write {}", (out_dir / "summary.jsonl").string()));
  }
  for (const auto& o : result.outcomes) {
    summary << o.summary.dump() << '\n';
    if (!o.ok()) result.exit_code = 1;
  }
  return result;
}

}  // namespace isqa
