#pragma once

#include "octane/types.hpp"
#include "octane/waveform.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace octane {

struct FiberSpan {
  double length_km = 75.0;
  double alpha_db_per_km = 0.2;
  double dispersion_ps_nm_km = 17.0;
  double gamma_per_w_km = 1.3;
  double step_km = 0.1;
};

struct Amplifier {
  double gain_db = 15.0;
  double noise_figure_db = 5.0;
};

struct LinkSpec {
  std::vector<std::pair<FiberSpan, Amplifier>> spans;
  double launch_power_dbm_total = 0.0;
};

// Root-raised-cosine pulse shaping, realized circularly in the frequency
// domain over the whole sequence. The matched cascade has unit gain at
// symbol instants, so waveform power is mean slot energy * Rs / Fs.
WaveformGrid rrc_shape(const SymbolStream& symbols, double rolloff, int samples_per_symbol,
                       double symbol_rate);

// Conjugate RRC filter plus symbol-instant sampling; inverse of
// rrc_shape on a noiseless back-to-back chain.
SymbolStream matched_filter_downsample(const WaveformGrid& w, double rolloff,
                                       int samples_per_symbol, double symbol_rate);

// Circularly delays each channel, shifts it to its grid slot (center
// channel at offset zero; shifts snap to the FFT bin grid so the
// periodic boundary stays exact) and sums the fields.
WaveformGrid wdm_mux(const std::vector<WaveformGrid>& channels, double spacing_hz,
                     const std::vector<long>& decorrelation_delays);

// Symmetric split-step solution of the Manakov equation
//   dA/dz = -(alpha/2) A - j (beta2/2) d^2A/dt^2 + j (8/9) gamma (|Ax|^2+|Ay|^2) A
// with loss inside the linear half-steps. beta2 follows from the span's
// dispersion at the waveform's center frequency.
WaveformGrid ssfm_span(const WaveformGrid& w, const FiberSpan& span);

// sqrt(gain) field scaling plus seeded circular-Gaussian ASE per
// polarisation with PSD (G-1) n_sp h nu, n_sp = 10^(NF/10)/2.
WaveformGrid edfa_amplify(const WaveformGrid& w, const Amplifier& amp, std::uint64_t seed);

// Scales to the aggregate launch power, then alternates span propagation
// and amplification; per-span noise seeds derive from (seed, span index).
WaveformGrid propagate_link(const WaveformGrid& w, const LinkSpec& link, std::uint64_t seed);

// Ideal brick-wall channel selection: shift by -offset, low-pass to the
// requested bandwidth.
WaveformGrid channel_select(const WaveformGrid& w, double offset_hz, double bandwidth_hz);

// Exact inverse all-pass of the accumulated dispersion (ps/nm total).
WaveformGrid cd_compensate(const WaveformGrid& w, double total_dispersion_ps_nm);

// beta2 (s^2/m) of a dispersion coefficient D (ps/(nm km)) at frequency nu.
double beta2_from_dispersion(double dispersion_ps_nm_km, double frequency_hz);

}  // namespace octane
