#include "isqa/config.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace isqa {

std::string_view to_string(AuditKind kind) {
  switch (kind) {
    case AuditKind::lemma3:
      return "lemma3";
    case AuditKind::lemma2:
      return "lemma2";
    case AuditKind::thm2_bound:
      return "thm2_bound";
    case AuditKind::floor:
      return "floor";
    case AuditKind::a4:
      return "a4";
  }
  return "?";
}

AuditKind parse_audit_kind(std::string_view text) {
  for (AuditKind k : all_audits()) {
    if (to_string(k) == text) return k;
  }
  throw UsageError(fmt::format("unknown audit '{}' (expected lemma3, lemma2, thm2_bound, floor, a4)", text));
}

const std::vector<AuditKind>& all_audits() {
  static const std::vector<AuditKind> kinds = {AuditKind::lemma3, AuditKind::lemma2,
                                               AuditKind::thm2_bound, AuditKind::floor,
                                               AuditKind::a4};
  return kinds;
}

std::vector<AuditKind> parse_audit_list(std::string_view text) {
  if (text == "all") return all_audits();
  if (text == "none" || text.empty()) return {};
  std::vector<AuditKind> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const auto item = text.substr(start, end - start);
    const AuditKind kind = parse_audit_kind(item);
    if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
    start = end + 1;
  }
  return out;
}

namespace {

void reject_unknown(const YAML::Node& node, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) throw UsageError(fmt::format("{} must be a mapping", where));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw UsageError(fmt::format("unknown key '{}{}{}'", where, where.empty() ? "" : ".", key));
    }
  }
}

template <class T>
std::optional<T> get(const YAML::Node& node, const std::string& key, const std::string& where) {
  const YAML::Node child = node[key];
  if (!child) return std::nullopt;
  try {
    return child.as<T>();
  } catch (const YAML::Exception&) {
    throw UsageError(fmt::format("{}.{} has the wrong type", where, key));
  }
}

template <class T>
T require(const YAML::Node& node, const std::string& key, const std::string& where) {
  auto v = get<T>(node, key, where);
  if (!v) throw UsageError(fmt::format("{}.{} is required", where, key));
  return *v;
}

std::vector<AuditKind> audits_from(const YAML::Node& node, const std::string& where) {
  if (node.IsScalar()) return parse_audit_list(node.as<std::string>());
  if (!node.IsSequence()) throw UsageError(fmt::format("{} must be a list", where));
  std::vector<AuditKind> out;
  for (const auto& item : node) out.push_back(parse_audit_kind(item.as<std::string>()));
  return out;
}

MetricPolicy metric_from(const YAML::Node& node, const ProblemInstance& problem) {
  const std::string where = "metric";
  if (!node) {
    if (!problem.known_local_L) {
      throw UsageError("metric is required for instances without a Lipschitz constant");
    }
    return MetricPolicy::scaled_identity(1.0 / *problem.known_local_L);
  }
  reject_unknown(node, where, {"kind", "tau", "m", "M", "memory"});
  const MetricKind kind = parse_metric_kind(get<std::string>(node, "kind", where).value_or("scaled-identity"));
  switch (kind) {
    case MetricKind::scaled_identity: {
      auto tau = get<double>(node, "tau", where);
      if (!tau) {
        if (!problem.known_local_L) throw UsageError("metric.tau is required for this instance");
        tau = 1.0 / *problem.known_local_L;
      }
      return MetricPolicy::scaled_identity(*tau);
    }
    case MetricKind::clipped_diagonal:
      return MetricPolicy::clipped_diagonal(require<double>(node, "m", where),
                                            require<double>(node, "M", where));
    case MetricKind::clipped_secant:
      return MetricPolicy::clipped_secant(require<double>(node, "m", where),
                                          require<double>(node, "M", where),
                                          get<std::size_t>(node, "memory", where).value_or(5));
  }
  throw UsageError("unreachable metric kind");
}

InexactnessPolicy inexactness_from(const YAML::Node& node, const MetricPolicy& metric) {
  const std::string where = "inexactness";
  InexactnessPolicy p;
  p.sigma = policy_sigma(metric);
  if (!node) return p;
  reject_unknown(node, where, {"mode", "eta", "n_inner", "sigma", "max_iterations", "tol"});
  p.mode = parse_inner_mode(get<std::string>(node, "mode", where).value_or("certificate"));
  p.sigma = get<double>(node, "sigma", where).value_or(p.sigma);
  p.max_iterations = get<std::size_t>(node, "max_iterations", where);
  switch (p.mode) {
    case InnerMode::certificate:
      p.eta = get<double>(node, "eta", where).value_or(0.9);
      break;
    case InnerMode::fixed_count:
      if (node["eta"]) throw UsageError("inexactness.eta is derived in fixed-count mode; set n_inner");
      p.n_inner = get<std::size_t>(node, "n_inner", where).value_or(5);
      p.eta = p.effective_eta();
      break;
    case InnerMode::near_exact:
      p.eta = 1.0;
      p.near_exact_tol = get<double>(node, "tol", where).value_or(1e-12);
      break;
  }
  p.validate();
  return p;
}

LineSearchSpec linesearch_from(const YAML::Node& node, const MetricPolicy& metric) {
  const std::string where = "linesearch";
  LineSearchSpec s;
  if (!node) return s;
  reject_unknown(node, where, {"variant", "beta", "gamma", "alpha_bar", "max_trials"});
  s.variant = parse_linesearch_variant(get<std::string>(node, "variant", where).value_or("LS3"));
  s.beta = get<double>(node, "beta", where).value_or(0.5);
  s.gamma = get<double>(node, "gamma", where)
                .value_or(s.variant == LineSearchVariant::ls2 ? metric.m / 4.0 : 0.5);
  s.alpha_bar = get<double>(node, "alpha_bar", where).value_or(1.0);
  s.max_trials = get<std::size_t>(node, "max_trials", where).value_or(200);
  return s;
}

RunSpec run_from(const YAML::Node& node, const YAML::Node& root,
                 std::optional<std::uint64_t> seed_override) {
  reject_unknown(node, "runs[]", {"name", "problem", "metric", "inexactness", "linesearch",
                                  "max_outer", "tol_direction", "tol_fgap", "seed", "audits",
                                  "sweep"});
  RunSpec spec;
  SolverConfig& c = spec.solver;
  c.name = require<std::string>(node, "name", "runs[]");
  try {
    const YAML::Node problem = node["problem"];
    if (!problem) throw UsageError("problem is required");
    reject_unknown(problem, "problem", {"instance", "dimension", "seed"});
    spec.instance = require<std::string>(problem, "instance", "problem");
    spec.dimension = require<std::size_t>(problem, "dimension", "problem");

    std::uint64_t seed = get<std::uint64_t>(root, "seed", "").value_or(0);
    seed = get<std::uint64_t>(node, "seed", "run").value_or(seed);
    seed = get<std::uint64_t>(problem, "seed", "problem").value_or(seed);
    if (seed_override) seed = *seed_override;
    c.seed = seed;
    c.problem = catalog_instantiate(spec.instance, spec.dimension, seed);

    c.metric_policy = metric_from(node["metric"], c.problem);
    c.inexactness = inexactness_from(node["inexactness"], c.metric_policy);
    c.linesearch = linesearch_from(node["linesearch"], c.metric_policy);
    c.max_outer = get<std::size_t>(node, "max_outer", "run").value_or(1000);
    c.tol_direction = get<double>(node, "tol_direction", "run").value_or(0.0);
    c.tol_fgap = get<double>(node, "tol_fgap", "run");

    if (node["audits"]) {
      spec.audits = audits_from(node["audits"], "audits");
    } else if (root["audits"]) {
      spec.audits = audits_from(root["audits"], "audits");
    }
    c.validate();
  } catch (const UsageError& e) {
    throw UsageError(fmt::format("run '{}': {}", c.name, e.what()));
  }
  return spec;
}

std::string scalar_text(const YAML::Node& node) {
  if (!node.IsScalar()) throw UsageError("sweep values must be scalars");
  return node.Scalar();
}

void set_path(YAML::Node node, const std::string& dotted, const YAML::Node& value) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw UsageError("empty sweep key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node[parts[i]]) node[parts[i]] = YAML::Node(YAML::NodeType::Map);
    node.reset(node[parts[i]]);
  }
  node[parts.back()] = value;
}

std::vector<YAML::Node> expand_sweep(const YAML::Node& run) {
  const YAML::Node sweep = run["sweep"];
  YAML::Node base = YAML::Clone(run);
  base.remove("sweep");
  if (!sweep) return {base};
  if (!sweep.IsMap()) throw UsageError("sweep must map dotted keys to lists");

  std::vector<std::pair<std::string, std::vector<YAML::Node>>> axes;
  for (const auto& kv : sweep) {
    const auto key = kv.first.as<std::string>();
    if (!kv.second.IsSequence() || kv.second.size() == 0) {
      throw UsageError(fmt::format("sweep.{} must be a non-empty list", key));
    }
    std::vector<YAML::Node> values(kv.second.begin(), kv.second.end());
    axes.emplace_back(key, std::move(values));
  }

  std::vector<YAML::Node> out;
  std::vector<std::size_t> index(axes.size(), 0);
  const std::string name = base["name"] ? base["name"].as<std::string>() : "run";
  while (true) {
    YAML::Node variant = YAML::Clone(base);
    std::string suffix;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& [key, values] = axes[a];
      set_path(variant, key, values[index[a]]);
      const auto leaf = key.substr(key.find_last_of('.') + 1);
      suffix += fmt::format(".{}={}", leaf, scalar_text(values[index[a]]));
    }
    variant["name"] = name + suffix;
    out.push_back(variant);

    std::size_t a = 0;
    while (a < axes.size() && ++index[a] == axes[a].second.size()) index[a++] = 0;
    if (a == axes.size()) break;
  }
  return out;
}

}  // namespace

std::vector<RunSpec> parse_config_text(std::string_view text,
                                       std::optional<std::uint64_t> seed_override) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw UsageError(fmt::format("config is not valid YAML: {}", e.what()));
  }
  if (!root || root.IsNull()) return {};
  reject_unknown(root, "", {"seed", "audits", "runs"});
  const YAML::Node runs = root["runs"];
  if (!runs) return {};
  if (!runs.IsSequence()) throw UsageError("runs must be a list");

  std::vector<RunSpec> out;
  std::set<std::string> names;
  for (const auto& run : runs) {
    if (!run.IsMap()) throw UsageError("each entry of runs must be a mapping");
    for (const auto& expanded : expand_sweep(run)) {
      RunSpec spec = run_from(expanded, root, seed_override);
      if (!names.insert(spec.solver.name).second) {
        throw UsageError(fmt::format("duplicate run name '{}'", spec.solver.name));
      }
      out.push_back(std::move(spec));
    }
  }
  return out;
}

std::vector<RunSpec> parse_config(const std::filesystem::path& path,
                                  std::optional<std::uint64_t> seed_override) {
  std::ifstream is(path);
  if (!is) throw UsageError(fmt::format("cannot open config {}", path.string()));
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str(), seed_override);
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* raw = std::getenv("ISQA_SEED");
  if (!raw || !*raw) return std::nullopt;
  char* end = nullptr;
  const auto value = std::strtoull(raw, &end, 10);
  if (*end != '\0') throw UsageError(fmt::format("ISQA_SEED='{}' is not an unsigned integer", raw));
  return value;
}

}  // namespace isqa
