#include "octane/phy.hpp"

#include "octane/rng.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>

namespace octane {

namespace {

void fft_transform(ArrayXc& a, bool inverse) {
  thread_local Eigen::FFT<double> engine;  // plan cache is per thread
  ArrayXc out(a.size());
  if (inverse)
    engine.inv(out.data(), a.data(), static_cast<int>(a.size()));
  else
    engine.fwd(out.data(), a.data(), static_cast<int>(a.size()));
  a.swap(out);
}

// Natural-order FFT frequency grid in Hz.
ArrayX fft_frequencies(long n, double sample_rate) {
  ArrayX f(n);
  for (long k = 0; k < n; ++k) {
    const long kk = 2 * k < n ? k : k - n;
    f(k) = static_cast<double>(kk) * sample_rate / static_cast<double>(n);
  }
  return f;
}

double rc_gain(double f, double rolloff, double symbol_rate) {
  const double af = std::abs(f);
  const double f1 = 0.5 * symbol_rate * (1.0 - rolloff);
  const double f2 = 0.5 * symbol_rate * (1.0 + rolloff);
  if (af <= f1) return 1.0;
  if (af >= f2) return 0.0;
  return 0.5 * (1.0 + std::cos(M_PI * (af - f1) / (rolloff * symbol_rate)));
}

ArrayX rrc_response(long n, double sample_rate, double rolloff, double symbol_rate,
                    int samples_per_symbol) {
  const ArrayX f = fft_frequencies(n, sample_rate);
  ArrayX h(n);
  for (long k = 0; k < n; ++k)
    h(k) = std::sqrt(samples_per_symbol * rc_gain(f(k), rolloff, symbol_rate));
  return h;
}

void check_shaping_args(double rolloff, int sps) {
  if (!(rolloff > 0.0 && rolloff <= 1.0))
    throw std::invalid_argument("rolloff must be in (0, 1]");
  if (sps < 2) throw std::invalid_argument("samples_per_symbol must be at least 2");
}

long snap_to_bin(double offset_hz, long n, double sample_rate) {
  return std::llround(offset_hz * static_cast<double>(n) / sample_rate);
}

}  // namespace

double beta2_from_dispersion(double dispersion_ps_nm_km, double frequency_hz) {
  if (frequency_hz <= 0.0)
    throw std::invalid_argument("center frequency must be positive for a dispersive element");
  const double lambda = kSpeedOfLight / frequency_hz;
  return -dispersion_ps_nm_km * 1e-6 * lambda * lambda / (2.0 * M_PI * kSpeedOfLight);
}

WaveformGrid rrc_shape(const SymbolStream& symbols, double rolloff, int samples_per_symbol,
                       double symbol_rate) {
  check_shaping_args(rolloff, samples_per_symbol);
  if (symbols.rows() == 0) throw std::invalid_argument("empty symbol stream");
  if (symbol_rate <= 0.0) throw std::invalid_argument("symbol rate must be positive");

  const long n_sym = symbols.rows();
  const long n = n_sym * samples_per_symbol;
  WaveformGrid w;
  w.sample_rate = symbol_rate * samples_per_symbol;
  w.center_frequency = 0.0;
  w.x = ArrayXc::Zero(n);
  w.y = ArrayXc::Zero(n);
  for (long k = 0; k < n_sym; ++k) {
    w.x(k * samples_per_symbol) = {symbols(k, 0), symbols(k, 1)};
    w.y(k * samples_per_symbol) = {symbols(k, 2), symbols(k, 3)};
  }
  const ArrayX h = rrc_response(n, w.sample_rate, rolloff, symbol_rate, samples_per_symbol);
  fft_transform(w.x, false);
  fft_transform(w.y, false);
  w.x *= h;
  w.y *= h;
  fft_transform(w.x, true);
  fft_transform(w.y, true);
  return w;
}

SymbolStream matched_filter_downsample(const WaveformGrid& w, double rolloff,
                                       int samples_per_symbol, double symbol_rate) {
  check_shaping_args(rolloff, samples_per_symbol);
  const long n = w.size();
  if (n == 0 || n % samples_per_symbol != 0)
    throw std::invalid_argument("waveform length is not a multiple of samples_per_symbol");
  if (std::abs(w.sample_rate - symbol_rate * samples_per_symbol) >
      1e-6 * w.sample_rate)
    throw std::invalid_argument("shaping parameters do not match the waveform sample rate");

  ArrayXc x = w.x, y = w.y;
  const ArrayX h = rrc_response(n, w.sample_rate, rolloff, symbol_rate, samples_per_symbol);
  fft_transform(x, false);
  fft_transform(y, false);
  x *= h;
  y *= h;
  fft_transform(x, true);
  fft_transform(y, true);

  const long n_sym = n / samples_per_symbol;
  SymbolStream out(n_sym, 4);
  for (long k = 0; k < n_sym; ++k) {
    const auto cx = x(k * samples_per_symbol);
    const auto cy = y(k * samples_per_symbol);
    out(k, 0) = cx.real();
    out(k, 1) = cx.imag();
    out(k, 2) = cy.real();
    out(k, 3) = cy.imag();
  }
  return out;
}

WaveformGrid wdm_mux(const std::vector<WaveformGrid>& channels, double spacing_hz,
                     const std::vector<long>& decorrelation_delays) {
  if (channels.empty()) throw std::invalid_argument("wdm_mux requires at least one channel");
  const long n = channels[0].size();
  const double fs = channels[0].sample_rate;
  for (const WaveformGrid& c : channels)
    if (c.size() != n || std::abs(c.sample_rate - fs) > 1e-6 * fs)
      throw std::invalid_argument("WDM channels must share length and sample rate");
  if (!decorrelation_delays.empty() && decorrelation_delays.size() != channels.size())
    throw std::invalid_argument("one decorrelation delay per channel expected");
  const long count = static_cast<long>(channels.size());
  if (count > 1 && static_cast<double>(count) * spacing_hz > fs)
    throw std::invalid_argument("aggregate WDM bandwidth exceeds the sampled grid");

  WaveformGrid out;
  out.sample_rate = fs;
  out.center_frequency = channels[static_cast<size_t>((count - 1) / 2)].center_frequency;
  out.x = ArrayXc::Zero(n);
  out.y = ArrayXc::Zero(n);

  for (long i = 0; i < count; ++i) {
    const double offset = (static_cast<double>(i) - 0.5 * static_cast<double>(count - 1)) * spacing_hz;
    const long k_off = snap_to_bin(offset, n, fs);
    const long delay =
        decorrelation_delays.empty()
            ? 0
            : ((decorrelation_delays[static_cast<size_t>(i)] % n) + n) % n;
    ArrayXc shift(n);
    for (long s = 0; s < n; ++s) {
      const double phase = 2.0 * M_PI * static_cast<double>(k_off) * static_cast<double>(s) /
                           static_cast<double>(n);
      shift(s) = std::polar(1.0, phase);
    }
    const WaveformGrid& ch = channels[static_cast<size_t>(i)];
    for (long s = 0; s < n; ++s) {
      const long src = (s - delay + n) % n;
      out.x(s) += ch.x(src) * shift(s);
      out.y(s) += ch.y(src) * shift(s);
    }
  }
  return out;
}

WaveformGrid ssfm_span(const WaveformGrid& w, const FiberSpan& span) {
  if (span.length_km <= 0.0 || span.step_km <= 0.0)
    throw std::invalid_argument("span length and step must be positive");
  if (span.step_km > span.length_km + 1e-12)
    throw std::invalid_argument("step_km exceeds the span length");
  if (span.alpha_db_per_km < 0.0 || span.gamma_per_w_km < 0.0)
    throw std::invalid_argument("negative loss or nonlinear coefficient");

  const long n = w.size();
  const double beta2_km =
      span.dispersion_ps_nm_km == 0.0
          ? 0.0
          : beta2_from_dispersion(span.dispersion_ps_nm_km, w.center_frequency) * 1000.0;
  const double alpha_km = span.alpha_db_per_km * M_LN10 / 10.0;  // power, 1/km
  const double gamma_eff = (8.0 / 9.0) * span.gamma_per_w_km;

  const ArrayX f = fft_frequencies(n, w.sample_rate);
  const ArrayX omega_sq = (2.0 * M_PI * f).square();

  long n_full = static_cast<long>(std::floor(span.length_km / span.step_km + 1e-9));
  double remainder = span.length_km - static_cast<double>(n_full) * span.step_km;
  if (remainder < 1e-9 * span.length_km) remainder = 0.0;
  std::vector<double> steps(static_cast<size_t>(n_full), span.step_km);
  if (remainder > 0.0) steps.push_back(remainder);

  // Linear operator over dz km; cached since only a few lengths occur.
  std::map<double, ArrayXc> lin_cache;
  auto linear_factor = [&](double dz) -> const ArrayXc& {
    auto it = lin_cache.find(dz);
    if (it == lin_cache.end()) {
      const double att = std::exp(-0.5 * alpha_km * dz);
      ArrayXc op(n);
      for (long k = 0; k < n; ++k) op(k) = std::polar(att, 0.5 * beta2_km * dz * omega_sq(k));
      it = lin_cache.emplace(dz, std::move(op)).first;
    }
    return it->second;
  };
  auto apply_linear = [&](WaveformGrid& g, double dz) {
    const ArrayXc& op = linear_factor(dz);
    g.x *= op;
    g.y *= op;
  };

  // Symmetric scheme with merged interior half-steps:
  //   L(h/2) N(h) L(h) N(h) ... N(h) L(h/2)
  WaveformGrid out = w;
  fft_transform(out.x, false);
  fft_transform(out.y, false);
  apply_linear(out, 0.5 * steps.front());
  const size_t n_steps = steps.size();
  for (size_t i = 0; i < n_steps; ++i) {
    fft_transform(out.x, true);
    fft_transform(out.y, true);
    const ArrayX phase = gamma_eff * steps[i] * (out.x.abs2() + out.y.abs2());
    const ArrayXc rot = (kImag * phase.cast<std::complex<double>>()).exp();
    out.x *= rot;
    out.y *= rot;
    fft_transform(out.x, false);
    fft_transform(out.y, false);
    const double post = i + 1 < n_steps ? 0.5 * (steps[i] + steps[i + 1]) : 0.5 * steps[i];
    apply_linear(out, post);
  }
  fft_transform(out.x, true);
  fft_transform(out.y, true);

  if (!out.x.allFinite() || !out.y.allFinite())
    throw std::runtime_error("non-finite field after span propagation (overflow)");
  return out;
}

WaveformGrid edfa_amplify(const WaveformGrid& w, const Amplifier& amp, std::uint64_t seed) {
  if (amp.gain_db < 0.0) throw std::invalid_argument("amplifier gain must be >= 0 dB");
  const double gain = db_to_linear(amp.gain_db);
  if (gain > 1.0 && amp.noise_figure_db < 3.0)
    std::cerr << "warning: noise figure " << amp.noise_figure_db
              << " dB is below the 3 dB quantum limit\n";

  WaveformGrid out = w;
  out.x *= std::sqrt(gain);
  out.y *= std::sqrt(gain);
  if (gain <= 1.0) return out;

  if (w.center_frequency <= 0.0)
    throw std::invalid_argument("ASE model requires a positive center frequency");
  const double n_sp = db_to_linear(amp.noise_figure_db) / 2.0;
  const double psd = (gain - 1.0) * n_sp * kPlanck * w.center_frequency;  // W/Hz per pol
  const double sigma = std::sqrt(0.5 * psd * w.sample_rate);  // per real component

  Rng rng(seed);
  const long n = out.size();
  for (long i = 0; i < n; ++i)
    out.x(i) += std::complex<double>(sigma * rng.normal(), sigma * rng.normal());
  for (long i = 0; i < n; ++i)
    out.y(i) += std::complex<double>(sigma * rng.normal(), sigma * rng.normal());
  return out;
}

WaveformGrid propagate_link(const WaveformGrid& w, const LinkSpec& link, std::uint64_t seed) {
  if (link.spans.empty()) throw std::invalid_argument("link must contain at least one span");
  if (!std::isfinite(link.launch_power_dbm_total))
    throw std::invalid_argument("launch power must be finite");
  const double p_in = signal_power(w);
  if (p_in <= 0.0) throw std::invalid_argument("cannot scale a zero-power waveform");

  WaveformGrid out = w;
  const double scale = std::sqrt(dbm_to_watt(link.launch_power_dbm_total) / p_in);
  out.x *= scale;
  out.y *= scale;
  for (size_t i = 0; i < link.spans.size(); ++i) {
    out = ssfm_span(out, link.spans[i].first);
    out = edfa_amplify(out, link.spans[i].second,
                       derive_seed(seed, {hash_key("span-ase"), static_cast<std::uint64_t>(i)}));
  }
  return out;
}

WaveformGrid channel_select(const WaveformGrid& w, double offset_hz, double bandwidth_hz) {
  if (bandwidth_hz <= 0.0) throw std::invalid_argument("selection bandwidth must be positive");
  if (std::abs(offset_hz) + 0.5 * bandwidth_hz > 0.5 * w.sample_rate)
    throw std::invalid_argument("selection band lies outside the sampled grid");

  const long n = w.size();
  const long k_off = snap_to_bin(offset_hz, n, w.sample_rate);
  const ArrayX f = fft_frequencies(n, w.sample_rate);

  ArrayXc sx = w.x, sy = w.y;
  fft_transform(sx, false);
  fft_transform(sy, false);
  WaveformGrid out;
  out.sample_rate = w.sample_rate;
  out.center_frequency = w.center_frequency + static_cast<double>(k_off) * w.sample_rate /
                                                  static_cast<double>(n);
  out.x = ArrayXc::Zero(n);
  out.y = ArrayXc::Zero(n);
  for (long k = 0; k < n; ++k) {
    if (std::abs(f(k)) > 0.5 * bandwidth_hz) continue;
    const long src = ((k + k_off) % n + n) % n;
    out.x(k) = sx(src);
    out.y(k) = sy(src);
  }
  fft_transform(out.x, true);
  fft_transform(out.y, true);
  return out;
}

WaveformGrid cd_compensate(const WaveformGrid& w, double total_dispersion_ps_nm) {
  if (!std::isfinite(total_dispersion_ps_nm))
    throw std::invalid_argument("dispersion must be finite");
  if (total_dispersion_ps_nm == 0.0) return w;

  if (w.center_frequency <= 0.0)
    throw std::invalid_argument("center frequency required for CD compensation");
  // Accumulated beta2*L in s^2; the compensator applies its inverse.
  const double lambda = kSpeedOfLight / w.center_frequency;
  const double beta2_l =
      -total_dispersion_ps_nm * 1e-3 * lambda * lambda / (2.0 * M_PI * kSpeedOfLight);

  const long n = w.size();
  const ArrayX omega = 2.0 * M_PI * fft_frequencies(n, w.sample_rate);
  const ArrayX phase = -0.5 * beta2_l * omega.square();
  ArrayXc op(n);
  for (long k = 0; k < n; ++k) op(k) = std::polar(1.0, phase(k));
  WaveformGrid out = w;
  fft_transform(out.x, false);
  fft_transform(out.y, false);
  out.x *= op;
  out.y *= op;
  fft_transform(out.x, true);
  fft_transform(out.y, true);
  return out;
}

}  // namespace octane
