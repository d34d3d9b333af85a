#pragma once

#include "octane/sim.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace octane {

// Raised for malformed or invalid configuration; the CLI maps it to
// exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// INI-style sections [format], [link], [sweep] of key=value lines.
// Unknown sections or keys are rejected with their line number.
// Returns "section.key" -> value.
std::map<std::string, std::string> parse_ini(std::istream& in);

// `key=value` or `section.key=value`; bare keys must be unambiguous.
void apply_override(std::map<std::string, std::string>& kv, const std::string& setting);

// Builds a validated SweepConfig with defaults applied. A relative
// constellation_file is resolved against base_dir when given.
SweepConfig config_from_kv(const std::map<std::string, std::string>& kv,
                           const std::string& base_dir = "");

SweepConfig parse_config(std::istream& in, const std::string& base_dir = "");

// Default axis points when a config names an axis but no points.
std::vector<double> default_axis_points(SweepAxis axis);

}  // namespace octane
