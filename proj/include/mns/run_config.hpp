#pragma once

#include "mns/sav_stepper.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mns {

enum class Subcommand { none, converge, stability, stir, run };

/// Problem driven by the `run` subcommand.
enum class Problem { manufactured, energy, stirring };

struct RunSpec {
  Subcommand subcommand = Subcommand::none;
  Problem problem = Problem::manufactured;
  Config config;
  std::vector<double> tau_list;        // converge, stability
  std::vector<double> snapshot_times;  // stir
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_vtk = true;
};

/// Malformed input or a violated invariant. The message carries the source
/// and line (or key) it refers to.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One key = value pair together with where it came from, for diagnostics.
struct ConfigEntry {
  std::string key;
  std::string value;
  std::string origin;  // "file:line" or "--flag"
};

/// Flat `key = value` lines ('#' starts a comment) or a JSON object whose
/// values are numbers, strings, booleans or arrays of numbers.
std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& source = "<config>");
std::vector<ConfigEntry> read_config_file(const std::string& path);

/// Applies the subcommand preset, then the entries in order, then validates.
/// Later entries override earlier ones.
RunSpec build_run_spec(const std::vector<ConfigEntry>& entries);

/// Config file (path may be empty), then MNS_OUT_DIR as `out`, then the
/// inline overrides.
RunSpec parse_config(const std::string& path, const std::vector<ConfigEntry>& overrides = {});

/// Preset for a subcommand on top of documented defaults.
RunSpec preset(Subcommand subcommand);

Subcommand parse_subcommand(const std::string& name);
std::string to_string(Subcommand subcommand);
std::string to_string(Problem problem);

/// Keys understood by build_run_spec.
const std::vector<std::string>& known_keys();

}  // namespace mns
