#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "isqa/driver.hpp"

namespace isqa {

struct TraceData {
  std::vector<IterationRecord> records;
  /// F at the point after the last record; absent for empty traces.
  std::optional<double> final_F;
  bool has_fgap = false;
};

/// CSV, one row per record, 17 significant digits. Columns
///   k, F_k, [fgap,] alpha_k, dir_norm, dir_norm_metric, Q_bar, inner_iters,
///   certified, ls_trials, dist_to_X
/// fgap appears only when the records carry it; an empty dist_to_X cell
/// means unknown. A trailing "# final_F=" comment follows nonempty traces.
void write_trace(std::ostream& os, const SolveReport& report);
void emit_trace(const SolveReport& report, const std::filesystem::path& path);

TraceData read_trace(std::istream& is);
TraceData read_trace(const std::filesystem::path& path);

/// A report rebuilt from a trace (final point unknown).
SolveReport report_from_trace(const TraceData& trace);

}  // namespace isqa
