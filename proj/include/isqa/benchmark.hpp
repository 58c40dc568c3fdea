#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "isqa/config.hpp"
#include "isqa/driver.hpp"
#include "isqa/oracle.hpp"

namespace isqa {

enum class AuditStatus { passed, failed, skipped };

std::string_view to_string(AuditStatus status);

struct AuditOutcome {
  AuditKind kind;
  AuditStatus status = AuditStatus::skipped;
  std::string detail;
};

/// Fills known F* and projector from a matching fixture when the instance
/// lacks them.
void attach_fixture_if_missing(RunSpec& spec, const std::vector<FixtureRecord>& fixtures);

/// Runs the enabled audits over a finished report. models holds subproblem
/// snapshots for the a4 audit; without them a4 is skipped.
std::vector<AuditOutcome> run_audits(const RunSpec& spec, const SolveReport& report,
                                     const std::vector<SubproblemModel>& models);

struct RunOutcome {
  std::string name;
  SolveReport report;
  std::vector<AuditOutcome> audits;
  /// Run error or trace I/O failure.
  std::optional<std::string> error;
  nlohmann::json summary;

  bool ok() const;
};

/// Number of leading iterations whose subproblems the a4 audit re-solves.
inline constexpr std::size_t kA4Snapshots = 5;

RunOutcome execute_run(const RunSpec& spec);

nlohmann::json summarize(const RunSpec& spec, const RunOutcome& outcome);

struct BenchmarkOptions {
  std::size_t jobs = 1;
  /// Replaces every run's audit list when set.
  std::optional<std::vector<AuditKind>> audits;
  std::vector<FixtureRecord> fixtures;
};

struct BenchmarkResult {
  int exit_code = 0;
  std::vector<RunOutcome> outcomes;
};

/// Writes <out>/<name>.csv per run and <out>/summary.jsonl (one JSON object
/// per line, in config order). Exit code 1 iff any run errored or any
/// enabled audit failed.
BenchmarkResult run_benchmark(std::vector<RunSpec> specs, const std::filesystem::path& out_dir,
                              const BenchmarkOptions& options);

}  // namespace isqa
