#include "octane/sim.hpp"

#include "octane/executor.hpp"
#include "octane/isotonic.hpp"
#include "octane/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace octane {

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::SnrDb:
      return "snr_db";
    case SweepAxis::DistanceSpans:
      return "distance_spans";
    case SweepAxis::LaunchPowerDbm:
      return "launch_power_dbm";
  }
  return "";
}

void SweepConfig::validate() const {
  if (formats.empty()) throw std::invalid_argument("config: no formats listed");
  if (axis_points.empty()) throw std::invalid_argument("config: axis points missing");
  for (size_t i = 1; i < axis_points.size(); ++i)
    if (!(axis_points[i] > axis_points[i - 1]))
      throw std::invalid_argument("config: axis points must be strictly increasing");
  if (n_blocks < 1000) throw std::invalid_argument("config: n_blocks must be >= 1000");
  if (n_symbols < 64) throw std::invalid_argument("config: n_symbols must be >= 64");
  if (samples_per_symbol < 2)
    throw std::invalid_argument("config: samples_per_symbol must be >= 2");
  if (!(rolloff > 0.0 && rolloff <= 1.0))
    throw std::invalid_argument("config: rolloff must be in (0, 1]");
  if (symbol_rate <= 0.0) throw std::invalid_argument("config: symbol_rate must be > 0");
  if (channels < 1 || channels % 2 == 0)
    throw std::invalid_argument("config: channels must be a positive odd count");
  if (step_km <= 0.0) throw std::invalid_argument("config: step_km must be > 0");
  if (span_km <= 0.0) throw std::invalid_argument("config: span_km must be > 0");
  if (step_km > span_km) throw std::invalid_argument("config: step_km must not exceed span_km");
  if (alpha_db_per_km < 0.0) throw std::invalid_argument("config: alpha_db_per_km must be >= 0");
  if (wavelength_nm <= 0.0) throw std::invalid_argument("config: wavelength_nm must be > 0");
  if (distance_spans < 1) throw std::invalid_argument("config: distance_spans must be >= 1");
  if (axis == SweepAxis::DistanceSpans) {
    for (double p : axis_points) {
      if (p < 0.0 || std::abs(p - std::round(p)) > 1e-9)
        throw std::invalid_argument("config: distance axis points must be whole span counts");
    }
  }
}

FormatSpec resolve_format(const std::string& id, const SweepConfig& cfg) {
  if (id == "pm8qam") return make_plain4d(build_pm8qam(cfg.pm8qam_geometry));
  if (id == "pmqpsk") return make_plain4d(build_pmqpsk());
  if (id == "4d64prs") return make_plain4d(load_constellation_file(cfg.constellation_file));
  if (id == "parity8d_t1")
    return extend_to_8d(load_constellation_file(cfg.constellation_file), ParityType::T1);
  if (id == "parity8d_t2")
    return extend_to_8d(load_constellation_file(cfg.constellation_file), ParityType::T2);
  if (id == "th4d2a8psk")
    return build_time_hybrid(build_2a8psk(cfg.ring_ratio, 5), build_2a8psk(cfg.ring_ratio, 6));
  throw std::invalid_argument("unknown format identifier '" + id + "'");
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <typename T>
std::string join_list(const std::vector<T>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, std::string>)
      out += xs[i];
    else if constexpr (std::is_same_v<T, double>)
      out += fmt_double(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out;
}

void sort_rows(SweepResult& r) {
  std::sort(r.rows.begin(), r.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.format != b.format) return a.format < b.format;
    return a.axis_value < b.axis_value;
  });
}

// Transmit-side state for the waveform sweeps: the muxed WDM comb at
// unit scale plus the centre channel's clean data for demapping.
struct TxContext {
  FormatSpec fmt;
  std::vector<std::uint32_t> tx_words;
  SymbolStream tx_slots;
  WaveformGrid muxed;
};

TxContext build_tx(const SweepConfig& cfg, const std::string& format_id) {
  TxContext ctx;
  ctx.fmt = resolve_format(format_id, cfg);
  const int bs = ctx.fmt.block_slots();
  const int bb = ctx.fmt.block_bits();
  if (cfg.n_symbols % bs != 0)
    throw std::invalid_argument("n_symbols must be a multiple of the format block length");
  const long n_blk = cfg.n_symbols / bs;

  const int center = (cfg.channels - 1) / 2;
  std::vector<WaveformGrid> channels(static_cast<size_t>(cfg.channels));
  std::vector<long> delays(static_cast<size_t>(cfg.channels), 0);
  int side_index = 0;
  for (int c = 0; c < cfg.channels; ++c) {
    Rng rng(derive_seed(cfg.seed,
                        {hash_key("bits"), hash_key(format_id), static_cast<std::uint64_t>(c)}));
    std::vector<std::uint32_t> words(static_cast<size_t>(n_blk));
    std::vector<std::uint8_t> bits(static_cast<size_t>(n_blk) * bb);
    for (long i = 0; i < n_blk; ++i) {
      words[static_cast<size_t>(i)] = rng.word(bb);
      for (int k = 0; k < bb; ++k)
        bits[static_cast<size_t>(i) * bb + k] =
            static_cast<std::uint8_t>((words[static_cast<size_t>(i)] >> (bb - 1 - k)) & 1u);
    }
    SymbolStream slots = map_bits(ctx.fmt, bits);
    channels[static_cast<size_t>(c)] =
        rrc_shape(slots, cfg.rolloff, cfg.samples_per_symbol, cfg.symbol_rate);
    if (c == center) {
      ctx.tx_words = std::move(words);
      ctx.tx_slots = std::move(slots);
    } else if (!cfg.decorrelation_symbols.empty()) {
      delays[static_cast<size_t>(c)] =
          cfg.decorrelation_symbols[static_cast<size_t>(side_index) %
                                    cfg.decorrelation_symbols.size()] *
          cfg.samples_per_symbol;
      ++side_index;
    }
  }
  ctx.muxed = wdm_mux(channels, cfg.channel_spacing_hz, delays);
  ctx.muxed.center_frequency = cfg.center_frequency();
  return ctx;
}

// Ideal receiver: select the centre channel, digitally compensate the
// accumulated dispersion, matched-filter, remove the data-aided complex
// gain per polarisation and demap with the estimated noise variance.
GmiReport receive(const SweepConfig& cfg, const TxContext& ctx, const WaveformGrid& w,
                  double total_dispersion_ps_nm) {
  const double bw = (1.0 + cfg.rolloff) * cfg.symbol_rate;
  WaveformGrid cut = channel_select(w, 0.0, std::min(bw, 0.999 * w.sample_rate));
  cut = cd_compensate(cut, total_dispersion_ps_nm);
  SymbolStream rx =
      matched_filter_downsample(cut, cfg.rolloff, cfg.samples_per_symbol, cfg.symbol_rate);

  const long n = rx.rows();
  std::complex<double> num_x{0, 0}, num_y{0, 0};
  double den_x = 0, den_y = 0;
  for (long i = 0; i < n; ++i) {
    const std::complex<double> tx_x(ctx.tx_slots(i, 0), ctx.tx_slots(i, 1));
    const std::complex<double> tx_y(ctx.tx_slots(i, 2), ctx.tx_slots(i, 3));
    const std::complex<double> rx_x(rx(i, 0), rx(i, 1));
    const std::complex<double> rx_y(rx(i, 2), rx(i, 3));
    num_x += std::conj(tx_x) * rx_x;
    num_y += std::conj(tx_y) * rx_y;
    den_x += std::norm(tx_x);
    den_y += std::norm(tx_y);
  }
  const std::complex<double> hx = num_x / den_x;
  const std::complex<double> hy = num_y / den_y;

  SymbolStream eq(n, 4);
  double err = 0.0;
  for (long i = 0; i < n; ++i) {
    const std::complex<double> ex = std::complex<double>(rx(i, 0), rx(i, 1)) / hx;
    const std::complex<double> ey = std::complex<double>(rx(i, 2), rx(i, 3)) / hy;
    eq(i, 0) = ex.real();
    eq(i, 1) = ex.imag();
    eq(i, 2) = ey.real();
    eq(i, 3) = ey.imag();
    err += std::norm(ex - std::complex<double>(ctx.tx_slots(i, 0), ctx.tx_slots(i, 1))) +
           std::norm(ey - std::complex<double>(ctx.tx_slots(i, 2), ctx.tx_slots(i, 3)));
  }
  const double sigma2 = std::max(err / (4.0 * static_cast<double>(n)), 1e-30);
  const double snr_db = -linear_to_db(4.0 * sigma2);
  return gmi_from_blocks(ctx.fmt, eq, ctx.tx_words, sigma2, snr_db);
}

}  // namespace

SweepResult awgn_sweep(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.axis != SweepAxis::SnrDb)
    throw std::invalid_argument("awgn_sweep requires axis = snr_db");

  std::vector<FormatSpec> fmts;
  for (const std::string& id : cfg.formats) fmts.push_back(resolve_format(id, cfg));

  const int n_fmt = static_cast<int>(fmts.size());
  const int n_pts = static_cast<int>(cfg.axis_points.size());
  SweepResult result;
  result.metadata = config_metadata(cfg);
  result.rows.resize(static_cast<size_t>(n_fmt) * n_pts);

  parallel_for(n_fmt * n_pts, cfg.workers, [&](int t) {
    const int fi = t / n_pts;
    const int pi = t % n_pts;
    const double snr = cfg.axis_points[static_cast<size_t>(pi)];
    const std::uint64_t row_seed =
        derive_seed(cfg.seed, {hash_key("awgn"), static_cast<std::uint64_t>(pi)});
    SweepRow row;
    row.format = cfg.formats[static_cast<size_t>(fi)];
    row.axis_value = snr;
    row.report = gmi_monte_carlo(fmts[static_cast<size_t>(fi)], snr, cfg.n_blocks, row_seed, 1);
    result.rows[static_cast<size_t>(t)] = std::move(row);
  });
  sort_rows(result);
  return result;
}

SweepResult reach_sweep(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.axis != SweepAxis::DistanceSpans)
    throw std::invalid_argument("reach_sweep requires axis = distance_spans");

  const int n_fmt = static_cast<int>(cfg.formats.size());
  const int n_pts = static_cast<int>(cfg.axis_points.size());
  SweepResult result;
  result.metadata = config_metadata(cfg);
  result.rows.resize(static_cast<size_t>(n_fmt) * n_pts);

  const FiberSpan span{cfg.span_km, cfg.alpha_db_per_km, cfg.dispersion_ps_nm_km,
                       cfg.gamma_per_w_km, cfg.step_km};
  const Amplifier amp{cfg.alpha_db_per_km * cfg.span_km, cfg.edfa_nf_db};
  const std::uint64_t ase_base = derive_seed(cfg.seed, {hash_key("ase")});

  parallel_for(n_fmt, cfg.workers, [&](int fi) {
    TxContext ctx = build_tx(cfg, cfg.formats[static_cast<size_t>(fi)]);
    WaveformGrid field = ctx.muxed;
    const double scale =
        std::sqrt(dbm_to_watt(cfg.launch_power_dbm) / signal_power(field));
    field.x *= scale;
    field.y *= scale;

    long spans_done = 0;
    for (int pi = 0; pi < n_pts; ++pi) {
      const long target = static_cast<long>(std::llround(cfg.axis_points[static_cast<size_t>(pi)]));
      while (spans_done < target) {
        field = ssfm_span(field, span);
        field = edfa_amplify(field, amp,
                             derive_seed(ase_base, {hash_key("span-ase"),
                                                    static_cast<std::uint64_t>(spans_done)}));
        ++spans_done;
      }
      SweepRow row;
      row.format = cfg.formats[static_cast<size_t>(fi)];
      row.axis_value = static_cast<double>(target);
      row.report = receive(cfg, ctx, field,
                           cfg.dispersion_ps_nm_km * cfg.span_km * static_cast<double>(target));
      result.rows[static_cast<size_t>(fi) * n_pts + pi] = std::move(row);
    }
  });
  sort_rows(result);
  return result;
}

SweepResult launch_power_sweep(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.axis != SweepAxis::LaunchPowerDbm)
    throw std::invalid_argument("launch_power_sweep requires axis = launch_power_dbm");

  const int n_fmt = static_cast<int>(cfg.formats.size());
  const int n_pts = static_cast<int>(cfg.axis_points.size());
  SweepResult result;
  result.metadata = config_metadata(cfg);
  result.rows.resize(static_cast<size_t>(n_fmt) * n_pts);

  std::vector<TxContext> contexts;
  contexts.reserve(static_cast<size_t>(n_fmt));
  for (const std::string& id : cfg.formats) contexts.push_back(build_tx(cfg, id));

  LinkSpec link;
  for (int s = 0; s < cfg.distance_spans; ++s)
    link.spans.push_back({FiberSpan{cfg.span_km, cfg.alpha_db_per_km, cfg.dispersion_ps_nm_km,
                                    cfg.gamma_per_w_km, cfg.step_km},
                          Amplifier{cfg.alpha_db_per_km * cfg.span_km, cfg.edfa_nf_db}});
  const std::uint64_t ase_base = derive_seed(cfg.seed, {hash_key("ase")});
  const double total_disp =
      cfg.dispersion_ps_nm_km * cfg.span_km * static_cast<double>(cfg.distance_spans);

  parallel_for(n_fmt * n_pts, cfg.workers, [&](int t) {
    const int fi = t / n_pts;
    const int pi = t % n_pts;
    LinkSpec run = link;
    run.launch_power_dbm_total = cfg.axis_points[static_cast<size_t>(pi)];
    const WaveformGrid rxw =
        propagate_link(contexts[static_cast<size_t>(fi)].muxed, run, ase_base);
    SweepRow row;
    row.format = cfg.formats[static_cast<size_t>(fi)];
    row.axis_value = run.launch_power_dbm_total;
    row.report = receive(cfg, contexts[static_cast<size_t>(fi)], rxw, total_disp);
    result.rows[static_cast<size_t>(t)] = std::move(row);
  });
  sort_rows(result);
  return result;
}

double reach_at_threshold(const std::vector<std::pair<double, double>>& curve,
                          double threshold) {
  if (curve.size() < 2) throw std::invalid_argument("reach curve needs at least two points");
  for (size_t i = 1; i < curve.size(); ++i)
    if (!(curve[i].first > curve[i - 1].first))
      throw std::invalid_argument("reach curve must be sorted by distance");

  ArrayX y(static_cast<Eigen::Index>(curve.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = curve[static_cast<size_t>(i)].second;
  const ArrayX fit = isotonic_fit(y, false);

  for (Eigen::Index i = 0; i < fit.size(); ++i) {
    if (fit(i) == threshold) return curve[static_cast<size_t>(i)].first;
    if (i + 1 < fit.size() && fit(i) > threshold && fit(i + 1) < threshold) {
      const double x0 = curve[static_cast<size_t>(i)].first;
      const double x1 = curve[static_cast<size_t>(i) + 1].first;
      return x0 + (fit(i) - threshold) / (fit(i) - fit(i + 1)) * (x1 - x0);
    }
  }
  throw std::runtime_error("NGMI threshold " + fmt_double(threshold) + " not reached");
}

std::vector<std::pair<double, double>> ngmi_curve(const SweepResult& result,
                                                  const std::string& format) {
  std::vector<std::pair<double, double>> curve;
  for (const SweepRow& r : result.rows)
    if (r.format == format) curve.emplace_back(r.axis_value, r.report.ngmi);
  std::sort(curve.begin(), curve.end());
  return curve;
}

std::vector<ReachGain> compare_reach(const SweepResult& result, const std::string& baseline,
                                     double threshold) {
  double span_km = 0.0;
  for (const auto& [k, v] : result.metadata)
    if (k == "link.span_km") span_km = std::stod(v);
  if (span_km <= 0.0)
    throw std::invalid_argument("result metadata does not carry link.span_km");

  std::vector<std::string> formats;
  for (const SweepRow& r : result.rows)
    if (std::find(formats.begin(), formats.end(), r.format) == formats.end())
      formats.push_back(r.format);
  if (std::find(formats.begin(), formats.end(), baseline) == formats.end())
    throw std::invalid_argument("baseline format '" + baseline + "' missing from results");

  auto reach_of = [&](const std::string& f) {
    auto curve = ngmi_curve(result, f);
    for (auto& [d, g] : curve) d *= span_km;
    return reach_at_threshold(curve, threshold);
  };
  const double base_reach = reach_of(baseline);

  std::vector<ReachGain> gains;
  for (const std::string& f : formats) {
    const double r = reach_of(f);
    gains.push_back({f, r, 100.0 * (r - base_reach) / base_reach});
  }
  return gains;
}

std::vector<double> curve_crossings(const std::vector<double>& axis, const ArrayX& fit_a,
                                    const ArrayX& fit_b) {
  if (static_cast<Eigen::Index>(axis.size()) != fit_a.size() || fit_a.size() != fit_b.size())
    throw std::invalid_argument("curve_crossings: size mismatch");
  std::vector<double> crossings;
  const ArrayX diff = fit_a - fit_b;
  int prev_sign = 0;
  double prev_x = 0.0, prev_d = 0.0;
  for (Eigen::Index i = 0; i < diff.size(); ++i) {
    const int sign = diff(i) > 0.0 ? 1 : diff(i) < 0.0 ? -1 : 0;
    if (sign != 0) {
      if (prev_sign != 0 && sign != prev_sign) {
        const double x =
            prev_x + (0.0 - prev_d) / (diff(i) - prev_d) * (axis[static_cast<size_t>(i)] - prev_x);
        crossings.push_back(x);
      }
      prev_sign = sign;
      prev_x = axis[static_cast<size_t>(i)];
      prev_d = diff(i);
    }
  }
  return crossings;
}

std::vector<std::pair<std::string, std::string>> config_metadata(const SweepConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> md;
  md.emplace_back("version", kToolkitVersion);
  md.emplace_back("format.formats", join_list(cfg.formats));
  md.emplace_back("format.constellation_file", cfg.constellation_file);
  md.emplace_back("format.ring_ratio", fmt_double(cfg.ring_ratio));
  md.emplace_back("format.pm8qam_geometry", cfg.pm8qam_geometry);
  md.emplace_back("link.span_km", fmt_double(cfg.span_km));
  md.emplace_back("link.alpha_db_per_km", fmt_double(cfg.alpha_db_per_km));
  md.emplace_back("link.dispersion_ps_nm_km", fmt_double(cfg.dispersion_ps_nm_km));
  md.emplace_back("link.gamma_per_w_km", fmt_double(cfg.gamma_per_w_km));
  md.emplace_back("link.step_km", fmt_double(cfg.step_km));
  md.emplace_back("link.edfa_nf_db", fmt_double(cfg.edfa_nf_db));
  md.emplace_back("link.wavelength_nm", fmt_double(cfg.wavelength_nm));
  md.emplace_back("link.launch_power_dbm", fmt_double(cfg.launch_power_dbm));
  md.emplace_back("link.distance_spans", std::to_string(cfg.distance_spans));
  md.emplace_back("sweep.axis", axis_name(cfg.axis));
  md.emplace_back("sweep.points", join_list(cfg.axis_points));
  md.emplace_back("sweep.n_blocks", std::to_string(cfg.n_blocks));
  md.emplace_back("sweep.seed", std::to_string(cfg.seed));
  md.emplace_back("sweep.n_symbols", std::to_string(cfg.n_symbols));
  md.emplace_back("sweep.samples_per_symbol", std::to_string(cfg.samples_per_symbol));
  md.emplace_back("sweep.rolloff", fmt_double(cfg.rolloff));
  md.emplace_back("sweep.symbol_rate_gbd", fmt_double(cfg.symbol_rate / 1e9));
  md.emplace_back("sweep.channels", std::to_string(cfg.channels));
  md.emplace_back("sweep.channel_spacing_ghz", fmt_double(cfg.channel_spacing_hz / 1e9));
  md.emplace_back("sweep.decorrelation_symbols", join_list(cfg.decorrelation_symbols));
  return md;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  for (const auto& [k, v] : result.metadata) out << "# metadata: " << k << "=" << v << "\n";
  out << "format,axis_name,axis_value,gmi,ngmi,snr_db,n_blocks,seed\n";
  std::string axis = "";
  std::uint64_t seed = 0;
  for (const auto& [k, v] : result.metadata) {
    if (k == "sweep.axis") axis = v;
    if (k == "sweep.seed") seed = std::stoull(v);
  }
  for (const SweepRow& r : result.rows) {
    out << r.format << ',' << axis << ',' << fmt_double(r.axis_value) << ','
        << fmt_double(r.report.gmi) << ',' << fmt_double(r.report.ngmi) << ','
        << fmt_double(r.report.snr_db) << ',' << r.report.n_blocks << ',' << seed << "\n";
  }
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream os;
  write_csv(result, os);
  return os.str();
}

std::vector<std::pair<std::string, std::string>> read_csv_metadata(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> md;
  std::string line;
  const std::string prefix = "# metadata: ";
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) != 0) continue;
    const std::string body = line.substr(prefix.size());
    const auto eq = body.find('=');
    if (eq == std::string::npos) continue;
    md.emplace_back(body.substr(0, eq), body.substr(eq + 1));
  }
  return md;
}

}  // namespace octane
