#include "octane/config.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

namespace octane {

namespace {

const std::vector<std::string> kKnownKeys = {
    "format.formats",
    "format.constellation_file",
    "format.ring_ratio",
    "format.pm8qam_geometry",
    "link.span_km",
    "link.alpha_db_per_km",
    "link.dispersion_ps_nm_km",
    "link.gamma_per_w_km",
    "link.step_km",
    "link.edfa_nf_db",
    "link.wavelength_nm",
    "link.launch_power_dbm",
    "link.distance_spans",
    "sweep.axis",
    "sweep.points",
    "sweep.n_blocks",
    "sweep.seed",
    "sweep.n_symbols",
    "sweep.samples_per_symbol",
    "sweep.rolloff",
    "sweep.symbol_rate_gbd",
    "sweep.channels",
    "sweep.channel_spacing_ghz",
    "sweep.decorrelation_symbols",
    "sweep.workers",
};

bool known_key(const std::string& k) {
  return std::find(kKnownKeys.begin(), kKnownKeys.end(), k) != kKnownKeys.end();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where.empty() ? what : where + ": " + what);
}

double parse_number(const std::string& where, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::logic_error&) {
    fail(where, "key '" + key + "': expected a number, got '" + v + "'");
  }
}

long parse_integer(const std::string& where, const std::string& key, const std::string& v) {
  const double x = parse_number(where, key, v);
  if (std::abs(x - std::round(x)) > 1e-9)
    fail(where, "key '" + key + "': expected an integer, got '" + v + "'");
  return static_cast<long>(std::llround(x));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_ini(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "format" && section != "link" && section != "sweep")
        fail(where, "unknown section '[" + section + "]'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected key=value, got '" + line + "'");
    if (section.empty()) fail(where, "key outside any section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_key(key)) fail(where, "unknown key '" + key + "'");
    if (kv.count(key)) fail(where, "duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

void apply_override(std::map<std::string, std::string>& kv, const std::string& setting) {
  const auto eq = setting.find('=');
  if (eq == std::string::npos)
    fail("override", "expected key=value, got '" + setting + "'");
  std::string key = trim(setting.substr(0, eq));
  const std::string value = trim(setting.substr(eq + 1));
  if (key.find('.') == std::string::npos) {
    std::vector<std::string> matches;
    for (const std::string& k : kKnownKeys)
      if (k.substr(k.find('.') + 1) == key) matches.push_back(k);
    if (matches.empty()) fail("override", "unknown key '" + key + "'");
    if (matches.size() > 1) fail("override", "ambiguous key '" + key + "'");
    key = matches.front();
  } else if (!known_key(key)) {
    fail("override", "unknown key '" + key + "'");
  }
  kv[key] = value;
}

std::vector<double> default_axis_points(SweepAxis axis) {
  std::vector<double> pts;
  switch (axis) {
    case SweepAxis::SnrDb:
      for (int s = 0; s <= 20; ++s) pts.push_back(s);
      break;
    case SweepAxis::DistanceSpans:
      for (int s = 0; s <= 16; ++s) pts.push_back(s);
      break;
    case SweepAxis::LaunchPowerDbm:
      for (int p = -6; p <= 12; p += 2) pts.push_back(p);
      break;
  }
  return pts;
}

SweepConfig config_from_kv(const std::map<std::string, std::string>& kv,
                           const std::string& base_dir) {
  SweepConfig cfg;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("format.formats")) cfg.formats = split_list(*v);
  if (const auto* v = get("format.constellation_file")) cfg.constellation_file = *v;
  if (const auto* v = get("format.ring_ratio"))
    cfg.ring_ratio = parse_number("", "ring_ratio", *v);
  if (const auto* v = get("format.pm8qam_geometry")) cfg.pm8qam_geometry = *v;

  if (const auto* v = get("link.span_km")) cfg.span_km = parse_number("", "span_km", *v);
  if (const auto* v = get("link.alpha_db_per_km"))
    cfg.alpha_db_per_km = parse_number("", "alpha_db_per_km", *v);
  if (const auto* v = get("link.dispersion_ps_nm_km"))
    cfg.dispersion_ps_nm_km = parse_number("", "dispersion_ps_nm_km", *v);
  if (const auto* v = get("link.gamma_per_w_km"))
    cfg.gamma_per_w_km = parse_number("", "gamma_per_w_km", *v);
  if (const auto* v = get("link.step_km")) cfg.step_km = parse_number("", "step_km", *v);
  if (const auto* v = get("link.edfa_nf_db")) cfg.edfa_nf_db = parse_number("", "edfa_nf_db", *v);
  if (const auto* v = get("link.wavelength_nm"))
    cfg.wavelength_nm = parse_number("", "wavelength_nm", *v);
  if (const auto* v = get("link.launch_power_dbm"))
    cfg.launch_power_dbm = parse_number("", "launch_power_dbm", *v);
  if (const auto* v = get("link.distance_spans"))
    cfg.distance_spans = static_cast<int>(parse_integer("", "distance_spans", *v));

  bool axis_given = false;
  if (const auto* v = get("sweep.axis")) {
    axis_given = true;
    if (*v == "snr_db")
      cfg.axis = SweepAxis::SnrDb;
    else if (*v == "distance_spans")
      cfg.axis = SweepAxis::DistanceSpans;
    else if (*v == "launch_power_dbm")
      cfg.axis = SweepAxis::LaunchPowerDbm;
    else
      fail("", "key 'axis': unknown axis '" + *v + "'");
  }
  if (const auto* v = get("sweep.points")) {
    cfg.axis_points.clear();
    for (const std::string& p : split_list(*v))
      cfg.axis_points.push_back(parse_number("", "points", p));
  } else if (axis_given) {
    cfg.axis_points = default_axis_points(cfg.axis);
  } else {
    cfg.axis_points = default_axis_points(SweepAxis::SnrDb);
  }
  if (const auto* v = get("sweep.n_blocks")) cfg.n_blocks = parse_integer("", "n_blocks", *v);
  if (const auto* v = get("sweep.seed")) {
    try {
      cfg.seed = std::stoull(*v);
    } catch (const std::logic_error&) {
      fail("", "key 'seed': expected an unsigned integer, got '" + *v + "'");
    }
  }
  if (const auto* v = get("sweep.n_symbols")) cfg.n_symbols = parse_integer("", "n_symbols", *v);
  if (const auto* v = get("sweep.samples_per_symbol"))
    cfg.samples_per_symbol = static_cast<int>(parse_integer("", "samples_per_symbol", *v));
  if (const auto* v = get("sweep.rolloff")) cfg.rolloff = parse_number("", "rolloff", *v);
  if (const auto* v = get("sweep.symbol_rate_gbd"))
    cfg.symbol_rate = parse_number("", "symbol_rate_gbd", *v) * 1e9;
  if (const auto* v = get("sweep.channels"))
    cfg.channels = static_cast<int>(parse_integer("", "channels", *v));
  if (const auto* v = get("sweep.channel_spacing_ghz"))
    cfg.channel_spacing_hz = parse_number("", "channel_spacing_ghz", *v) * 1e9;
  if (const auto* v = get("sweep.decorrelation_symbols")) {
    cfg.decorrelation_symbols.clear();
    for (const std::string& p : split_list(*v))
      cfg.decorrelation_symbols.push_back(parse_integer("", "decorrelation_symbols", p));
  }
  if (const auto* v = get("sweep.workers"))
    cfg.workers = static_cast<int>(parse_integer("", "workers", *v));

  if (!base_dir.empty() && !cfg.constellation_file.empty() &&
      cfg.constellation_file.front() != '/')
    cfg.constellation_file = base_dir + "/" + cfg.constellation_file;

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

SweepConfig parse_config(std::istream& in, const std::string& base_dir) {
  return config_from_kv(parse_ini(in), base_dir);
}

}  // namespace octane
