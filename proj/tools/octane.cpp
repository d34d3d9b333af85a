#include "octane/config.hpp"
#include "octane/executor.hpp"
#include "octane/sim.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace octane;

std::string kind_label(const FormatSpec& f) {
  switch (f.kind) {
    case FormatSpec::Kind::Plain4D:
      return "plain 4D";
    case FormatSpec::Kind::Parity8D:
      return f.parity == ParityType::T1 ? "parity-extended 8D (T1)" : "parity-extended 8D (T2)";
    case FormatSpec::Kind::TimeHybrid:
      return "time-domain hybrid";
  }
  return "?";
}

void inspect_format(const SweepConfig& cfg, std::ostream& out) {
  for (const std::string& id : cfg.formats) {
    const FormatSpec fmt = resolve_format(id, cfg);
    out << "format: " << id << "\n";
    out << "  kind: " << kind_label(fmt) << "\n";
    out << "  codewords: " << (1 << fmt.block_bits()) << "\n";
    out << "  bits per block: " << fmt.block_bits() << "\n";
    out << "  spectral efficiency: " << fmt.bits_per_4d() << " bit/4D\n";
    out << "  min euclidean distance: " << min_euclidean_distance(fmt) << "\n";
    out << "  polarisation-identical codewords: " << polarisation_identical_count(fmt) << "\n";

    double max_var = 0.0;
    for (const Constellation& c : fmt.slots) max_var = std::max(max_var, c.modulus_variance());
    out << "  constant modulus: " << (max_var < kEnergyTol ? "PASS" : "FAIL")
        << " (per-slot norm variance " << max_var << ")\n";

    if (fmt.kind == FormatSpec::Kind::Parity8D) {
      long ok = 0;
      const long total = 1 << 11;
      for (long w = 0; w < total; ++w) {
        const std::uint32_t cw = parity8d_codeword(fmt.parity, static_cast<std::uint32_t>(w));
        const int b12 = static_cast<int>(cw & 1u);
        if (b12 == parity_bit(fmt.parity, static_cast<std::uint32_t>(cw >> 1))) ++ok;
      }
      out << "  parity check: " << (ok == total ? "PASS" : "FAIL") << " (" << ok << "/" << total
          << " codewords satisfy the parity equation)\n";
    }
    out << "\n";
  }
}

int run_command(const std::string& cmd, SweepConfig cfg, const std::string& out_path) {
  for (const auto& [k, v] : config_metadata(cfg))
    std::cerr << "# resolved " << k << "=" << v << "\n";

  std::ostringstream body;
  if (cmd == "inspect-format") {
    inspect_format(cfg, body);
  } else {
    SweepResult result;
    if (cmd == "awgn-sweep")
      result = awgn_sweep(cfg);
    else if (cmd == "reach-sweep")
      result = reach_sweep(cfg);
    else
      result = launch_power_sweep(cfg);
    write_csv(result, body);
  }

  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file '" + out_path + "'");
    out << body.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multidimensional modulation formats over AWGN and fibre links"};
  app.fallthrough();

  std::string config_path, out_path;
  std::vector<std::string> sets;
  int workers = -1;
  std::int64_t seed = -1;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--out", out_path, "output file (CSV for sweeps, text report otherwise)");
  app.add_option("--set", sets, "override a config key (key=value, repeatable)");
  app.add_option("--workers", workers, "worker thread count (overrides OCTANE_WORKERS)");
  app.add_option("--seed", seed, "random seed override");

  octane::SweepAxis forced_axis = octane::SweepAxis::SnrDb;
  bool has_axis = false;
  auto* c_inspect = app.add_subcommand("inspect-format", "report format properties");
  auto* c_awgn = app.add_subcommand("awgn-sweep", "NGMI vs SNR over an AWGN channel");
  auto* c_reach = app.add_subcommand("reach-sweep", "NGMI vs distance over the fibre link");
  auto* c_power = app.add_subcommand("power-sweep", "NGMI vs launch power at fixed distance");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::map<std::string, std::string> kv;
    std::string base_dir;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw octane::ConfigError("cannot open config file '" + config_path + "'");
      kv = octane::parse_ini(in);
      base_dir = std::filesystem::path(config_path).parent_path().string();
    }
    for (const std::string& s : sets) octane::apply_override(kv, s);

    if (c_awgn->parsed()) {
      forced_axis = octane::SweepAxis::SnrDb;
      has_axis = true;
    } else if (c_reach->parsed()) {
      forced_axis = octane::SweepAxis::DistanceSpans;
      has_axis = true;
    } else if (c_power->parsed()) {
      forced_axis = octane::SweepAxis::LaunchPowerDbm;
      has_axis = true;
    }
    if (has_axis) {
      const auto it = kv.find("sweep.axis");
      if (it == kv.end()) {
        kv["sweep.axis"] = octane::axis_name(forced_axis);
      } else if (it->second != octane::axis_name(forced_axis)) {
        throw octane::ConfigError("config axis '" + it->second +
                                  "' does not match the requested sweep");
      }
    }

    octane::SweepConfig cfg = octane::config_from_kv(kv, base_dir);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (workers >= 0) {
      cfg.workers = workers;
    } else if (const char* env = std::getenv("OCTANE_WORKERS")) {
      cfg.workers = std::max(0, std::atoi(env));
    }

    // Unknown formats and missing fixtures are configuration problems;
    // surface them before any long-running work starts.
    for (const std::string& id : cfg.formats) {
      try {
        (void)octane::resolve_format(id, cfg);
      } catch (const std::exception& e) {
        throw octane::ConfigError(e.what());
      }
    }

    std::string cmd = "inspect-format";
    if (c_awgn->parsed()) cmd = "awgn-sweep";
    if (c_reach->parsed()) cmd = "reach-sweep";
    if (c_power->parsed()) cmd = "power-sweep";
    (void)c_inspect;
    return run_command(cmd, std::move(cfg), out_path);
  } catch (const octane::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
