// isqa: benchmark harness for the inexact SQA solver.
//
//   isqa run --config runs.yaml --out results/ [--jobs N] [--audits all|none|a,b]
//   isqa audit --trace results/quad.csv --spec runs.yaml
//   isqa fixtures --regen [--force]

#include <fmt/format.h>

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "isqa/benchmark.hpp"
#include "isqa/config.hpp"
#include "isqa/oracle.hpp"
#include "isqa/trace.hpp"

namespace fs = std::filesystem;
using namespace isqa;

namespace {

std::vector<FixtureRecord> load_fixtures_quietly(const fs::path& path) {
  if (!fs::exists(path)) return {};
  return read_fixtures(path);
}

int cmd_run(const fs::path& config, const fs::path& out, std::size_t jobs,
            const std::string& audits, const fs::path& fixtures) {
  BenchmarkOptions options;
  options.jobs = jobs;
  if (!audits.empty()) options.audits = parse_audit_list(audits);
  options.fixtures = load_fixtures_quietly(fixtures);
  auto specs = parse_config(config, seed_from_environment());
  const BenchmarkResult result = run_benchmark(std::move(specs), out, options);
  for (const auto& o : result.outcomes) {
    std::string line = fmt::format("{:<32} {:<20} iters={:<6} F={:.10g}", o.name,
                                   to_string(o.report.termination_reason),
                                   o.report.records.size(), o.report.final_F);
    for (const auto& a : o.audits) line += fmt::format(" {}={}", to_string(a.kind), to_string(a.status));
    if (o.error) line += fmt::format(" error: {}", *o.error);
    std::cout << line << '\n';
  }
  return result.exit_code;
}

int cmd_audit(const fs::path& trace_path, const fs::path& spec_path, std::string run_name,
              const std::string& audits, const fs::path& fixtures) {
  auto specs = parse_config(spec_path, seed_from_environment());
  if (run_name.empty()) run_name = trace_path.stem().string();
  RunSpec* spec = nullptr;
  for (auto& s : specs) {
    if (s.solver.name == run_name) spec = &s;
  }
  if (!spec) throw UsageError(fmt::format("no run named '{}' in {}", run_name, spec_path.string()));
  if (!audits.empty()) spec->audits = parse_audit_list(audits);
  attach_fixture_if_missing(*spec, load_fixtures_quietly(fixtures));

  const SolveReport report = report_from_trace(read_trace(trace_path));
  int status = 0;
  for (const auto& a : run_audits(*spec, report, {})) {
    std::cout << fmt::format("{:<11} {:<7} {}\n", to_string(a.kind), to_string(a.status), a.detail);
    if (a.status == AuditStatus::failed) status = 1;
  }
  return status;
}

int cmd_fixtures(const fs::path& path, bool force) {
  if (fs::exists(path) && !force) {
    std::cerr << fmt::format("{} exists; pass --force to overwrite it\n", path.string());
    return 2;
  }
  const auto records = compute_fixtures(default_fixture_keys());
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_fixtures(path, records);
  std::cout << fmt::format("wrote {} reference solutions to {}\n", records.size(), path.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inexact successive quadratic approximation benchmark harness"};
  app.require_subcommand(1);
  const std::string default_fixtures = std::string(ISQA_FIXTURE_DIR) + "/reference_solutions.tsv";

  fs::path config, out, trace, spec, fixtures = default_fixtures;
  std::size_t jobs = 1;
  std::string audits, run_name;
  bool regen = false, force = false;

  auto* run = app.add_subcommand("run", "run every config and write traces plus summary.jsonl");
  run->add_option("--config", config, "YAML run file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  run->add_option("--audits", audits, "all, none, or a comma list overriding the config");
  run->add_option("--fixtures", fixtures, "reference solution table");

  auto* audit = app.add_subcommand("audit", "re-run audits on a stored trace");
  audit->add_option("--trace", trace, "trace CSV")->required()->check(CLI::ExistingFile);
  audit->add_option("--spec", spec, "config that produced it")->required()->check(CLI::ExistingFile);
  audit->add_option("--run", run_name, "run name (defaults to the trace file stem)");
  audit->add_option("--audits", audits, "all, none, or a comma list");
  audit->add_option("--fixtures", fixtures, "reference solution table");

  auto* fix = app.add_subcommand("fixtures", "rebuild oracle reference solutions");
  fix->add_flag("--regen", regen, "recompute the table")->required();
  fix->add_flag("--force", force, "overwrite an existing table");
  fix->add_option("--path", fixtures, "output table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out, jobs, audits, fixtures);
    if (*audit) return cmd_audit(trace, spec, run_name, audits, fixtures);
    if (*fix) return cmd_fixtures(fixtures, force);
  } catch (const UsageError& e) {
    std::cerr << "isqa: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "isqa: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
