#include "mns/run_config.hpp"

#include "mns/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mns {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string where(const ConfigEntry& e) { return e.origin.empty() ? "" : e.origin + ": "; }

double to_number(const ConfigEntry& e) {
  const std::string v = trim(e.value);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size() || !std::isfinite(x)) {
    throw ConfigError(where(e) + "key '" + e.key + "': expected a number, got '" + e.value + "'");
  }
  return x;
}

int to_int(const ConfigEntry& e) {
  const double x = to_number(e);
  if (x != std::floor(x) || std::abs(x) > 1e9) {
    throw ConfigError(where(e) + "key '" + e.key + "': expected an integer, got '" + e.value + "'");
  }
  return static_cast<int>(x);
}

std::vector<double> to_list(const ConfigEntry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(to_number({e.key, item, e.origin}));
  }
  if (out.empty()) throw ConfigError(where(e) + "key '" + e.key + "': empty list");
  return out;
}

std::string json_scalar(const nlohmann::json& v, const std::string& key, const std::string& source) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  throw ConfigError(source + ": key '" + key + "': unsupported value " + v.dump());
}

std::vector<ConfigEntry> parse_json(const std::string& text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError(source + ": " + err.what());
  }
  if (!doc.is_object()) throw ConfigError(source + ": top-level JSON value must be an object");
  std::vector<ConfigEntry> out;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    std::string value;
    if (it->is_array()) {
      for (std::size_t i = 0; i < it->size(); ++i) {
        if (i) value += ',';
        value += json_scalar((*it)[i], it.key(), source);
      }
    } else {
      value = json_scalar(*it, it.key(), source);
    }
    out.push_back({it.key(), value, source});
  }
  return out;
}

using Setter = std::function<void(RunSpec&, const ConfigEntry&)>;

struct KeyTable {
  std::map<std::string, Setter> setters;
  std::vector<std::string> names;
};

SolverMethod to_method(const ConfigEntry& e) {
  if (e.value == "direct") return SolverMethod::direct;
  if (e.value == "iterative") return SolverMethod::iterative;
  throw ConfigError(where(e) + "key 'solver': expected direct or iterative, got '" + e.value + "'");
}

Problem to_problem(const ConfigEntry& e) {
  if (e.value == "manufactured") return Problem::manufactured;
  if (e.value == "energy") return Problem::energy;
  if (e.value == "stirring") return Problem::stirring;
  throw ConfigError(where(e) + "key 'problem': expected manufactured, energy or stirring, got '" + e.value + "'");
}

const KeyTable& key_table() {
  static const KeyTable table = [] {
    KeyTable t;
    auto add = [&](const std::string& name, Setter s) {
      t.setters[name] = std::move(s);
      t.names.push_back(name);
    };
    auto real = [&](const std::string& name, double Config::*field) {
      add(name, [field](RunSpec& r, const ConfigEntry& e) { r.config.*field = to_number(e); });
    };
    real("nu", &Config::nu);
    real("nu_r", &Config::nu_r);
    real("nur", &Config::nu_r);
    real("j", &Config::microinertia);
    real("microinertia", &Config::microinertia);
    real("c1", &Config::c1);
    real("c2", &Config::c2);
    real("T", &Config::final_time);
    real("final_time", &Config::final_time);
    real("tau", &Config::tau);
    real("h", &Config::h);
    add("viscosity", [](RunSpec& r, const ConfigEntry& e) { r.config.nu = r.config.nu_r = to_number(e); });
    add("xmin", [](RunSpec& r, const ConfigEntry& e) { r.config.domain.xmin = to_number(e); });
    add("xmax", [](RunSpec& r, const ConfigEntry& e) { r.config.domain.xmax = to_number(e); });
    add("ymin", [](RunSpec& r, const ConfigEntry& e) { r.config.domain.ymin = to_number(e); });
    add("ymax", [](RunSpec& r, const ConfigEntry& e) { r.config.domain.ymax = to_number(e); });
    add("domain", [](RunSpec& r, const ConfigEntry& e) {
      const auto v = to_list(e);
      if (v.size() != 4) throw ConfigError(where(e) + "key 'domain': expected xmin,xmax,ymin,ymax");
      r.config.domain = {v[0], v[1], v[2], v[3]};
    });
    add("solver", [](RunSpec& r, const ConfigEntry& e) { r.config.solver.method = to_method(e); });
    add("rtol", [](RunSpec& r, const ConfigEntry& e) { r.config.solver.rtol = to_number(e); });
    add("rtol_div", [](RunSpec& r, const ConfigEntry& e) { r.config.solver.rtol_div = to_number(e); });
    add("max_iterations", [](RunSpec& r, const ConfigEntry& e) { r.config.solver.max_iterations = to_int(e); });
    add("tau_list", [](RunSpec& r, const ConfigEntry& e) { r.tau_list = to_list(e); });
    add("snapshot_times", [](RunSpec& r, const ConfigEntry& e) { r.snapshot_times = to_list(e); });
    add("problem", [](RunSpec& r, const ConfigEntry& e) { r.problem = to_problem(e); });
    add("out", [](RunSpec& r, const ConfigEntry& e) { r.out_dir = trim(e.value); });
    add("formats", [](RunSpec& r, const ConfigEntry& e) {
      r.write_csv = r.write_vtk = false;
      std::stringstream ss(e.value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item == "csv") {
          r.write_csv = true;
        } else if (item == "vtk") {
          r.write_vtk = true;
        } else if (!item.empty()) {
          throw ConfigError(where(e) + "key 'formats': unknown format '" + item + "'");
        }
      }
    });
    return t;
  }();
  return table;
}

void check_list(const std::vector<double>& v, const std::string& name) {
  for (double x : v) {
    if (!(x > 0.0)) throw ConfigError(name + " entries must be positive");
  }
}

void validate(const RunSpec& spec) {
  try {
    spec.config.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  if (spec.out_dir.empty()) throw ConfigError("out must not be empty");
  switch (spec.subcommand) {
    case Subcommand::none:
      throw ConfigError("subcommand required (converge, stability, stir or run)");
    case Subcommand::converge: {
      if (spec.tau_list.empty()) throw ConfigError("tau_list must not be empty");
      check_list(spec.tau_list, "tau_list");
      for (std::size_t i = 1; i < spec.tau_list.size(); ++i) {
        if (!(spec.tau_list[i] < spec.tau_list[i - 1])) throw ConfigError("tau_list must be strictly descending");
      }
      for (double tau : spec.tau_list) {
        const double steps = spec.config.final_time / tau;
        if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
          throw ConfigError("each tau_list entry must divide T");
        }
      }
      break;
    }
    case Subcommand::stability:
      if (spec.tau_list.empty()) throw ConfigError("tau_list must not be empty");
      check_list(spec.tau_list, "tau_list");
      break;
    case Subcommand::stir:
      for (double t : spec.snapshot_times) {
        if (t < 0.0 || t > spec.config.final_time) throw ConfigError("snapshot_times must lie in [0, T]");
      }
      break;
    case Subcommand::run:
      break;
  }
}

}  // namespace

Subcommand parse_subcommand(const std::string& name) {
  if (name == "converge") return Subcommand::converge;
  if (name == "stability") return Subcommand::stability;
  if (name == "stir") return Subcommand::stir;
  if (name == "run") return Subcommand::run;
  throw ConfigError("unknown subcommand '" + name + "' (expected converge, stability, stir or run)");
}

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::converge: return "converge";
    case Subcommand::stability: return "stability";
    case Subcommand::stir: return "stir";
    case Subcommand::run: return "run";
    case Subcommand::none: break;
  }
  return "none";
}

std::string to_string(Problem p) {
  switch (p) {
    case Problem::manufactured: return "manufactured";
    case Problem::energy: return "energy";
    case Problem::stirring: return "stirring";
  }
  return "manufactured";
}

const std::vector<std::string>& known_keys() { return key_table().names; }

std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& source) {
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') return parse_json(text, source);
  std::vector<ConfigEntry> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string origin = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(origin + ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ": missing key");
    out.push_back({key, trim(line.substr(eq + 1)), origin});
  }
  return out;
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

RunSpec preset(Subcommand subcommand) {
  RunSpec spec;
  spec.subcommand = subcommand;
  switch (subcommand) {
    case Subcommand::converge:
      spec.tau_list = {0.2, 0.1, 0.05, 0.025};
      break;
    case Subcommand::stability:
      spec.config.nu = spec.config.nu_r = 0.1;
      spec.config.final_time = 5.0;
      spec.tau_list = {1.0, 0.1, 0.01};
      spec.problem = Problem::energy;
      break;
    case Subcommand::stir:
      spec.config = stirring_config(0.1);
      spec.snapshot_times = {1, 5, 7, 10, 15, 18, 20, 23, 25};
      spec.problem = Problem::stirring;
      break;
    case Subcommand::run:
    case Subcommand::none:
      break;
  }
  return spec;
}

RunSpec build_run_spec(const std::vector<ConfigEntry>& entries) {
  Subcommand sub = Subcommand::none;
  for (const auto& e : entries) {
    if (e.key != "subcommand") continue;
    try {
      sub = parse_subcommand(trim(e.value));
    } catch (const ConfigError& err) {
      throw ConfigError(where(e) + err.what());
    }
  }
  RunSpec spec = preset(sub);
  const auto& setters = key_table().setters;
  bool tau_set = false;
  bool tau_list_set = false;
  for (const auto& e : entries) {
    if (e.key == "subcommand") continue;
    const auto it = setters.find(e.key);
    if (it == setters.end()) throw ConfigError(where(e) + "unknown key '" + e.key + "'");
    it->second(spec, e);
    tau_set |= e.key == "tau";
    tau_list_set |= e.key == "tau_list";
  }
  // A single tau replaces the preset sweep.
  if (tau_set && !tau_list_set && (sub == Subcommand::converge || sub == Subcommand::stability)) {
    spec.tau_list = {spec.config.tau};
  }
  if (!spec.tau_list.empty() && !tau_set) spec.config.tau = spec.tau_list.front();
  validate(spec);
  return spec;
}

RunSpec parse_config(const std::string& path, const std::vector<ConfigEntry>& overrides) {
  std::vector<ConfigEntry> entries;
  if (!path.empty()) entries = read_config_file(path);
  if (const char* env = std::getenv("MNS_OUT_DIR"); env && *env) entries.push_back({"out", env, "MNS_OUT_DIR"});
  entries.insert(entries.end(), overrides.begin(), overrides.end());
  return build_run_spec(entries);
}

}  // namespace mns
