#pragma once

#include "octane/format.hpp"
#include "octane/metrics.hpp"
#include "octane/phy.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace octane {

enum class SweepAxis { SnrDb, DistanceSpans, LaunchPowerDbm };

std::string axis_name(SweepAxis axis);

struct SweepConfig {
  // [format]
  std::vector<std::string> formats = {"pm8qam", "th4d2a8psk", "parity8d_t1", "parity8d_t2"};
  std::string constellation_file = "data/4d64prs.txt";
  double ring_ratio = kDefaultRingRatio;
  std::string pm8qam_geometry = "rect";

  // [link]
  double span_km = 75.0;
  double alpha_db_per_km = 0.2;
  double dispersion_ps_nm_km = 17.0;
  double gamma_per_w_km = 1.3;
  double step_km = 0.1;
  double edfa_nf_db = 5.0;
  double wavelength_nm = 1550.116;
  double launch_power_dbm = 6.0;  // reach sweep operating point
  int distance_spans = 12;        // launch-power sweep distance

  // [sweep]
  SweepAxis axis = SweepAxis::SnrDb;
  std::vector<double> axis_points;
  long n_blocks = 100000;
  std::uint64_t seed = 1;
  long n_symbols = 16384;  // 4D slots per transmitted sequence
  int samples_per_symbol = 4;
  double rolloff = 0.01;
  double symbol_rate = 41.79e9;
  int channels = 3;
  double channel_spacing_hz = 50e9;
  std::vector<long> decorrelation_symbols = {10200, 40800};
  int workers = 0;  // 0 = auto; never changes results

  double center_frequency() const { return kSpeedOfLight / (wavelength_nm * 1e-9); }
  void validate() const;
};

// Format identifiers accepted in configs: pm8qam, pmqpsk, 4d64prs,
// parity8d_t1, parity8d_t2, th4d2a8psk.
FormatSpec resolve_format(const std::string& id, const SweepConfig& cfg);

struct SweepRow {
  std::string format;
  double axis_value = 0.0;
  GmiReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (format, axis_value)
  std::vector<std::pair<std::string, std::string>> metadata;
};

SweepResult awgn_sweep(const SweepConfig& cfg);
SweepResult reach_sweep(const SweepConfig& cfg);
SweepResult launch_power_sweep(const SweepConfig& cfg);

// Distance at which the isotonic-fitted curve falls to the threshold,
// linearly interpolated between the bracketing points.
double reach_at_threshold(const std::vector<std::pair<double, double>>& curve,
                          double threshold);

struct ReachGain {
  std::string format;
  double reach_km = 0.0;
  double gain_percent = 0.0;
};

// Per-format reach at the NGMI threshold and percentage gain over the
// baseline format. Distances come from the result's span axis times the
// span length recorded in its metadata.
std::vector<ReachGain> compare_reach(const SweepResult& result, const std::string& baseline,
                                     double threshold);

// (format, axis_value, ngmi) extraction for one format, axis-sorted.
std::vector<std::pair<double, double>> ngmi_curve(const SweepResult& result,
                                                  const std::string& format);

// Axis positions where two isotonic-fitted curves cross (sign changes of
// their difference, linearly interpolated).
std::vector<double> curve_crossings(const std::vector<double>& axis, const ArrayX& fit_a,
                                    const ArrayX& fit_b);

// CSV schema: `# metadata:` comment lines echoing the full configuration,
// then `format,axis_name,axis_value,gmi,ngmi,snr_db,n_blocks,seed`.
void write_csv(const SweepResult& result, std::ostream& out);
std::string to_csv(const SweepResult& result);

// Parses the `# metadata:` lines of a CSV back into key=value pairs
// (enough to re-run the sweep bit-identically).
std::vector<std::pair<std::string, std::string>> read_csv_metadata(std::istream& in);

std::vector<std::pair<std::string, std::string>> config_metadata(const SweepConfig& cfg);

}  // namespace octane
