#pragma once

#include "octane/types.hpp"

#include <string>

namespace octane {

// Dual-polarisation complex baseband field envelope, sqrt(W) units.
struct WaveformGrid {
  ArrayXc x;
  ArrayXc y;
  double sample_rate = 0.0;       // Hz
  double center_frequency = 0.0;  // Hz, absolute

  long size() const { return x.size(); }
};

inline double signal_power(const WaveformGrid& w) {
  return (w.x.abs2() + w.y.abs2()).mean();
}

// Binary little-endian interleaved complex64 (x_re, x_im, y_re, y_im)
// with a one-line text sidecar `<path>.meta` carrying sample_rate and
// center_frequency.
void dump_waveform(const WaveformGrid& w, const std::string& path);
WaveformGrid load_waveform(const std::string& path);

}  // namespace octane
