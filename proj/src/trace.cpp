#include "isqa/trace.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace isqa {

namespace {

constexpr std::string_view kFinalPrefix = "# final_F=";

bool records_have_fgap(const SolveReport& report) {
  for (const auto& r : report.records) {
    if (r.fgap) return true;
  }
  return false;
}

double parse_double(std::string_view text, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError(fmt::format("trace line {}: '{}' is not a number", line, text));
  }
  return value;
}

std::size_t parse_count(std::string_view text, std::size_t line) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError(fmt::format("trace line {}: '{}' is not a count", line, text));
  }
  return value;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_trace(std::ostream& os, const SolveReport& report) {
  const bool fgap = records_have_fgap(report);
  os << "k,F_k," << (fgap ? "fgap," : "")
     << "alpha_k,dir_norm,dir_norm_metric,Q_bar,inner_iters,certified,ls_trials,dist_to_X\n";
  for (const auto& r : report.records) {
    os << r.k << ',' << fmt::format("{:.17g}", r.F_k) << ',';
    if (fgap) os << (r.fgap ? fmt::format("{:.17g}", *r.fgap) : "") << ',';
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},", r.alpha_k, r.dir_norm,
                      r.dir_norm_metric, r.Q_bar)
       << r.inner_iters << ',' << (r.certified ? 1 : 0) << ',' << r.ls_trials << ','
       << (r.dist_to_X ? fmt::format("{:.17g}", *r.dist_to_X) : "") << '\n';
  }
  if (!report.records.empty()) os << kFinalPrefix << fmt::format("{:.17g}", report.final_F) << '\n';
}

void emit_trace(const SolveReport& report, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(fmt::format("cannot write trace {}", path.string()));
  write_trace(os, report);
  os.flush();
  if (!os) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
}

TraceData read_trace(std::istream& is) {
  TraceData out;
  std::string line;
  if (!std::getline(is, line)) throw UsageError("trace is empty (no header)");
  const auto header = split(line);
  out.has_fgap = header.size() > 2 && header[2] == "fgap";
  const std::size_t expected = out.has_fgap ? 11 : 10;
  if (header.size() != expected || header[0] != "k") {
    throw UsageError(fmt::format("unrecognised trace header '{}'", line));
  }

  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind(kFinalPrefix, 0) == 0) {
      out.final_F = parse_double(std::string_view(line).substr(kFinalPrefix.size()), lineno);
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != expected) {
      throw UsageError(fmt::format("trace line {}: expected {} cells, found {}", lineno, expected,
                                   cells.size()));
    }
    IterationRecord r;
    std::size_t c = 0;
    r.k = parse_count(cells[c++], lineno);
    r.F_k = parse_double(cells[c++], lineno);
    if (out.has_fgap) {
      if (!cells[c].empty()) r.fgap = parse_double(cells[c], lineno);
      ++c;
    }
    r.alpha_k = parse_double(cells[c++], lineno);
    r.dir_norm = parse_double(cells[c++], lineno);
    r.dir_norm_metric = parse_double(cells[c++], lineno);
    r.Q_bar = parse_double(cells[c++], lineno);
    r.inner_iters = parse_count(cells[c++], lineno);
    r.certified = parse_count(cells[c++], lineno) != 0;
    r.ls_trials = parse_count(cells[c++], lineno);
    if (!cells[c].empty()) r.dist_to_X = parse_double(cells[c], lineno);
    out.records.push_back(r);
  }
  return out;
}

TraceData read_trace(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError(fmt::format("cannot open trace {}", path.string()));
  return read_trace(is);
}

SolveReport report_from_trace(const TraceData& trace) {
  SolveReport report;
  report.records = trace.records;
  report.final_F = trace.final_F.value_or(trace.records.empty() ? 0.0 : trace.records.back().F_k);
  for (const auto& r : trace.records) report.total_inner_iterations += r.inner_iters;
  return report;
}

}  // namespace isqa
