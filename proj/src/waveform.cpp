#include "octane/waveform.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace octane {

void dump_waveform(const WaveformGrid& w, const std::string& path) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open '" + path + "' for writing");
  std::vector<float> buf(static_cast<size_t>(w.size()) * 4);
  for (long i = 0; i < w.size(); ++i) {
    buf[4 * static_cast<size_t>(i) + 0] = static_cast<float>(w.x(i).real());
    buf[4 * static_cast<size_t>(i) + 1] = static_cast<float>(w.x(i).imag());
    buf[4 * static_cast<size_t>(i) + 2] = static_cast<float>(w.y(i).real());
    buf[4 * static_cast<size_t>(i) + 3] = static_cast<float>(w.y(i).imag());
  }
  bin.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));

  std::ofstream meta(path + ".meta");
  meta.precision(17);
  meta << "sample_rate=" << w.sample_rate << " center_frequency=" << w.center_frequency << "\n";
}

WaveformGrid load_waveform(const std::string& path) {
  std::ifstream bin(path, std::ios::binary | std::ios::ate);
  if (!bin) throw std::runtime_error("cannot open '" + path + "'");
  const std::streamsize bytes = bin.tellg();
  if (bytes % static_cast<std::streamsize>(4 * sizeof(float)) != 0)
    throw std::runtime_error("waveform file '" + path + "' has a partial sample record");
  const long n = static_cast<long>(bytes / static_cast<std::streamsize>(4 * sizeof(float)));
  bin.seekg(0);
  std::vector<float> buf(static_cast<size_t>(n) * 4);
  bin.read(reinterpret_cast<char*>(buf.data()), bytes);

  WaveformGrid w;
  w.x.resize(n);
  w.y.resize(n);
  for (long i = 0; i < n; ++i) {
    w.x(i) = {buf[4 * static_cast<size_t>(i) + 0], buf[4 * static_cast<size_t>(i) + 1]};
    w.y(i) = {buf[4 * static_cast<size_t>(i) + 2], buf[4 * static_cast<size_t>(i) + 3]};
  }

  std::ifstream meta(path + ".meta");
  if (!meta) throw std::runtime_error("missing sidecar '" + path + ".meta'");
  std::string tok;
  while (meta >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const double val = std::stod(tok.substr(eq + 1));
    if (key == "sample_rate") w.sample_rate = val;
    if (key == "center_frequency") w.center_frequency = val;
  }
  return w;
}

}  // namespace octane
