#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isqa/driver.hpp"

namespace isqa {

enum class AuditKind { lemma3, lemma2, thm2_bound, floor, a4 };

std::string_view to_string(AuditKind kind);
AuditKind parse_audit_kind(std::string_view text);
const std::vector<AuditKind>& all_audits();

/// "all", "none", or a comma-separated list of audit names.
std::vector<AuditKind> parse_audit_list(std::string_view text);

struct RunSpec {
  SolverConfig solver;
  std::string instance;
  std::size_t dimension = 0;
  std::vector<AuditKind> audits;
};

/// Parses a YAML document of the form
///
///   seed: 7                      # optional default for every run
///   audits: [lemma3, lemma2]     # optional default for every run
///   runs:
///     - name: quad
///       problem: {instance: sc-quadratic-l1, dimension: 20}
///       metric: {kind: clipped-diagonal, m: 0.5, M: 20}
///       inexactness: {mode: certificate, eta: 0.9}
///       linesearch: {variant: LS3}
///       max_outer: 500
///       sweep: {inexactness.eta: [0.5, 0.9, 0.99]}
///
/// Sweeps expand to the cartesian product of their lists. Unknown keys are
/// rejected. seed_override (ISQA_SEED) replaces every seed.
std::vector<RunSpec> parse_config_text(std::string_view text,
                                       std::optional<std::uint64_t> seed_override = std::nullopt);

std::vector<RunSpec> parse_config(const std::filesystem::path& path,
                                  std::optional<std::uint64_t> seed_override = std::nullopt);

/// Value of ISQA_SEED, if set. Throws UsageError when it is not an integer.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace isqa
