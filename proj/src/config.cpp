#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "jch/errors.hpp"
#include "jch/experiments.hpp"

namespace jch {

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::dimer_sweep: return "dimer_sweep";
    case ExperimentKind::catalog_scaling: return "catalog_scaling";
    case ExperimentKind::nucleation_map: return "nucleation_map";
    case ExperimentKind::integration_time: return "integration_time";
    case ExperimentKind::bipartite: return "bipartite";
    case ExperimentKind::meanfield_scan: return "meanfield_scan";
  }
  return "?";
}

const char* protocol_name(Schedule::Kind kind) {
  return kind == Schedule::Kind::quench ? "quench" : "adiabatic";
}

std::vector<double> DeltaGrid::values_over_g() const {
  std::vector<double> out;
  if (include_zero) out.push_back(0.0);
  if (points == 1) {
    out.push_back(std::pow(10.0, log10_min));
    return out;
  }
  const double step = (log10_max - log10_min) / static_cast<double>(points - 1);
  for (int k = 0; k < points; ++k)
    out.push_back(std::pow(10.0, log10_min + k * step));
  return out;
}

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct RawConfig {
  std::string origin;
  std::map<std::string, RawEntry> entries;  // "section.key" -> value

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  std::string take(const std::string& key, const std::string& fallback) {
    auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    it->second.used = true;
    return it->second.value;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    auto it = entries.find(key);
    const std::string at =
        it == entries.end() ? origin : origin + ":" + std::to_string(it->second.line);
    throw ConfigInvalid(at + ": key '" + key + "': " + msg);
  }
};

std::string strip_ws(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(RawConfig& raw, const std::string& key, double fallback) {
  const std::string v = raw.take(key, "");
  if (v.empty()) return fallback;
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    raw.fail(key, "cannot parse number '" + v + "'");
  }
}

int parse_int(RawConfig& raw, const std::string& key, int fallback) {
  const std::string v = raw.take(key, "");
  if (v.empty()) return fallback;
  try {
    std::size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (...) {
    raw.fail(key, "cannot parse integer '" + v + "'");
  }
}

bool parse_bool(RawConfig& raw, const std::string& key, bool fallback) {
  const std::string v = raw.take(key, "");
  if (v.empty()) return fallback;
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  raw.fail(key, "expected true/false, got '" + v + "'");
}

std::vector<double> parse_double_list(RawConfig& raw, const std::string& key,
                                      std::vector<double> fallback) {
  const std::string v = raw.take(key, "");
  if (v.empty()) return fallback;
  std::vector<double> out;
  std::string item;
  std::istringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = strip_ws(item);
    if (item.empty()) raw.fail(key, "empty list element");
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      raw.fail(key, "cannot parse list element '" + item + "'");
    }
  }
  if (out.empty()) raw.fail(key, "empty list");
  return out;
}

std::vector<int> parse_int_list(RawConfig& raw, const std::string& key,
                                std::vector<int> fallback) {
  const std::string v = raw.take(key, "");
  if (v.empty()) return fallback;
  std::vector<int> out;
  std::string item;
  std::istringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = strip_ws(item);
    try {
      out.push_back(std::stoi(item));
    } catch (...) {
      raw.fail(key, "cannot parse list element '" + item + "'");
    }
  }
  if (out.empty()) raw.fail(key, "empty list");
  return out;
}

RawConfig tokenize(const std::string& text, const std::string& origin) {
  static const std::set<std::string> known_sections = {
      "graph", "params", "sweep", "windows", "map", "meanfield", "output"};

  RawConfig raw;
  raw.origin = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip_ws(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigInvalid(origin + ":" + std::to_string(lineno) + ": malformed section '" +
                            line + "'");
      section = strip_ws(line.substr(1, line.size() - 2));
      if (!known_sections.count(section))
        throw ConfigInvalid(origin + ":" + std::to_string(lineno) + ": unknown section '[" +
                            section + "]'");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigInvalid(origin + ":" + std::to_string(lineno) + ": expected key = value, got '" +
                          line + "'");
    const std::string key = strip_ws(line.substr(0, eq));
    const std::string value = strip_ws(line.substr(eq + 1));
    if (key.empty())
      throw ConfigInvalid(origin + ":" + std::to_string(lineno) + ": missing key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (raw.entries.count(full))
      throw ConfigInvalid(origin + ":" + std::to_string(lineno) + ": duplicate key '" + full +
                          "'");
    raw.entries[full] = {value, lineno, false};
  }
  return raw;
}

ExperimentKind parse_experiment_kind(RawConfig& raw) {
  const std::string v = raw.take("experiment", "");
  if (v.empty()) throw ConfigInvalid(raw.origin + ": missing 'experiment' key");
  for (ExperimentKind k :
       {ExperimentKind::dimer_sweep, ExperimentKind::catalog_scaling,
        ExperimentKind::nucleation_map, ExperimentKind::integration_time,
        ExperimentKind::bipartite, ExperimentKind::meanfield_scan})
    if (v == experiment_name(k)) return k;
  raw.fail("experiment", "unknown experiment '" + v + "'");
}

void apply_graph_defaults(ExperimentConfig& c) {
  if (!c.graph_file.empty() || !c.catalog_nodes.empty()) return;
  switch (c.experiment) {
    case ExperimentKind::dimer_sweep: c.catalog_nodes = {2}; c.catalog_index = 0; break;
    case ExperimentKind::catalog_scaling: c.catalog_nodes = {4, 5}; break;
    case ExperimentKind::nucleation_map: c.catalog_nodes = {4}; break;
    case ExperimentKind::integration_time: c.catalog_nodes = {2, 3}; c.catalog_index = 0; break;
    case ExperimentKind::bipartite: break;     // built-in reference array
    case ExperimentKind::meanfield_scan: break;  // no graph needed
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  RawConfig raw = tokenize(text, origin);
  ExperimentConfig c;
  c.experiment = parse_experiment_kind(raw);

  c.graph_file = raw.take("graph.file", "");
  c.catalog_nodes = parse_int_list(raw, "graph.nodes", {});
  c.catalog_index = parse_int(raw, "graph.index", -1);
  if (!c.graph_file.empty() && !c.catalog_nodes.empty())
    raw.fail("graph.nodes", "give either a graph file or catalog nodes, not both");
  apply_graph_defaults(c);

  c.preset = raw.take("params.preset", "");
  if (c.preset == "sweep-params" || c.preset.empty()) {
    // g = 1e-2 omega, J = 1e-2 g: the detuning-sweep parameter set.
  } else if (c.preset == "fig4-params") {
    c.J_over_omega = 1e-3;  // g = 1e-2 omega, J = 1e-3 omega
  } else {
    raw.fail("params.preset", "unknown preset '" + c.preset + "'");
  }
  c.omega = parse_double(raw, "params.omega", 1.0);
  c.g_over_omega = parse_double(raw, "params.g_over_omega", c.g_over_omega);
  const bool has_jg = raw.has("params.J_over_g");
  const bool has_jw = raw.has("params.J_over_omega");
  if (has_jg && has_jw) raw.fail("params.J_over_g", "give J_over_g or J_over_omega, not both");
  if (has_jg) c.J_over_omega = parse_double(raw, "params.J_over_g", 0.0) * c.g_over_omega;
  if (has_jw) c.J_over_omega = parse_double(raw, "params.J_over_omega", 0.0);
  c.n_max = parse_int(raw, "params.n_max", 5);
  const std::string sector = raw.take("params.sector", "auto");
  if (sector == "auto") c.sector_restricted = true;
  else if (sector == "none") c.sector_restricted = false;
  else raw.fail("params.sector", "expected auto or none, got '" + sector + "'");

  c.grid.log10_min = parse_double(raw, "sweep.delta_log10_min", -1.0);
  c.grid.log10_max = parse_double(raw, "sweep.delta_log10_max", 1.0);
  c.grid.points = parse_int(raw, "sweep.points", 25);
  c.grid.include_zero = parse_bool(raw, "sweep.include_zero",
                                   c.experiment == ExperimentKind::dimer_sweep);
  const std::string protos =
      raw.take("sweep.protocols",
               c.experiment == ExperimentKind::dimer_sweep ? "quench,adiabatic" : "quench");
  c.protocols.clear();
  {
    std::istringstream ss(protos);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = strip_ws(item);
      if (item == "quench") c.protocols.push_back(Schedule::Kind::quench);
      else if (item == "adiabatic") c.protocols.push_back(Schedule::Kind::adiabatic);
      else raw.fail("sweep.protocols", "unknown protocol '" + item + "'");
    }
    if (c.protocols.empty()) raw.fail("sweep.protocols", "empty protocol list");
  }

  c.measure_time_J = parse_double(raw, "windows.measure_T_J", 1.0);
  c.window_list_J = parse_double_list(raw, "windows.windows_J", {1, 3, 4});
  c.ramp_time_J = parse_double(raw, "windows.ramp_time_J", 20.0);
  c.samples = parse_int(raw, "windows.samples", 200);

  c.map_log10_deltas = parse_double_list(raw, "map.deltas_log10", {0.5, 0.7, 0.75, 0.8});

  c.mf_k_list = parse_double_list(raw, "meanfield.k_list", {1, 2, 3});
  c.mf_tune_mu = parse_bool(raw, "meanfield.tune_mu", false);
  c.mf_tol = parse_double(raw, "meanfield.tol", 1e-8);
  c.mf_max_iter = parse_int(raw, "meanfield.max_iter", 10000);

  c.out_dir = raw.take("output.dir", "out");
  c.write_timeseries = parse_bool(raw, "output.timeseries", false);
  c.threads = parse_int(raw, "output.threads", 0);
  c.seed = static_cast<unsigned>(parse_int(raw, "output.seed", 0));

  for (const auto& [key, entry] : raw.entries)
    if (!entry.used)
      throw ConfigInvalid(origin + ":" + std::to_string(entry.line) + ": unknown key '" + key +
                          "'");

  // Validation of the assembled configuration.
  auto invalid = [&](const std::string& msg) { throw ConfigInvalid(origin + ": " + msg); };
  if (c.omega <= 0.0) invalid("omega must be positive");
  if (c.g_over_omega <= 0.0) invalid("g_over_omega must be positive");
  if (c.J_over_omega < 0.0) invalid("J must be nonnegative");
  if (c.n_max < 1) invalid("n_max must be >= 1");
  if (c.grid.points < 1) invalid("sweep.points must be >= 1");
  if (c.grid.points > 1 && c.grid.log10_min >= c.grid.log10_max)
    invalid("sweep grid must be strictly increasing");
  if (c.samples < 8) invalid("windows.samples must be >= 8");
  if (c.measure_time_J <= 0.0) invalid("windows.measure_T_J must be positive");
  if (c.ramp_time_J <= 0.0) invalid("windows.ramp_time_J must be positive");
  for (double w : c.window_list_J)
    if (w <= 0.0) invalid("windows.windows_J entries must be positive");
  if (c.threads < 0) invalid("output.threads must be >= 0");
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}

}  // namespace

std::string config_echo(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "experiment = " << experiment_name(c.experiment) << "\n\n";

  out << "[graph]\n";
  if (!c.graph_file.empty()) out << "file = " << c.graph_file << "\n";
  if (!c.catalog_nodes.empty()) {
    out << "nodes = ";
    for (std::size_t i = 0; i < c.catalog_nodes.size(); ++i)
      out << (i ? "," : "") << c.catalog_nodes[i];
    out << "\n";
  }
  out << "index = " << c.catalog_index << "\n\n";

  out << "[params]\n";
  if (!c.preset.empty()) out << "preset = " << c.preset << "\n";
  out << "omega = " << fmt(c.omega) << "\n";
  out << "g_over_omega = " << fmt(c.g_over_omega) << "\n";
  out << "J_over_omega = " << fmt(c.J_over_omega) << "\n";
  out << "n_max = " << c.n_max << "\n";
  out << "sector = " << (c.sector_restricted ? "auto" : "none") << "\n\n";

  out << "[sweep]\n";
  out << "delta_log10_min = " << fmt(c.grid.log10_min) << "\n";
  out << "delta_log10_max = " << fmt(c.grid.log10_max) << "\n";
  out << "points = " << c.grid.points << "\n";
  out << "include_zero = " << (c.grid.include_zero ? "true" : "false") << "\n";
  out << "protocols = ";
  for (std::size_t i = 0; i < c.protocols.size(); ++i)
    out << (i ? "," : "") << protocol_name(c.protocols[i]);
  out << "\n\n";

  out << "[windows]\n";
  out << "measure_T_J = " << fmt(c.measure_time_J) << "\n";
  out << "windows_J = " << fmt_list(c.window_list_J) << "\n";
  out << "ramp_time_J = " << fmt(c.ramp_time_J) << "\n";
  out << "samples = " << c.samples << "\n\n";

  out << "[map]\n";
  out << "deltas_log10 = " << fmt_list(c.map_log10_deltas) << "\n\n";

  out << "[meanfield]\n";
  out << "k_list = " << fmt_list(c.mf_k_list) << "\n";
  out << "tune_mu = " << (c.mf_tune_mu ? "true" : "false") << "\n";
  out << "tol = " << fmt(c.mf_tol) << "\n";
  out << "max_iter = " << c.mf_max_iter << "\n\n";

  out << "[output]\n";
  out << "dir = " << c.out_dir << "\n";
  out << "timeseries = " << (c.write_timeseries ? "true" : "false") << "\n";
  out << "threads = " << c.threads << "\n";
  out << "seed = " << c.seed << "\n";
  return out.str();
}

}  // namespace jch
