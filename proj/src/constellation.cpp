#include "octane/constellation.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace octane {

namespace {

int gray(int k) { return k ^ (k >> 1); }

// Position of label v on the Gray-coded ring of 2^nbits phases.
int gray_inverse(int v, int nbits) {
  for (int k = 0; k < (1 << nbits); ++k)
    if (gray(k) == v) return k;
  throw std::logic_error("gray_inverse: value out of range");
}

int parity(std::uint32_t v) { return std::popcount(v) & 1; }

void set_complex(MatrixX& m, int row, int col_pair, double r, double phase) {
  m(row, 2 * col_pair) = r * std::cos(phase);
  m(row, 2 * col_pair + 1) = r * std::sin(phase);
}

}  // namespace

std::uint32_t bits_to_index(const BitWord& bits) {
  std::uint32_t v = 0;
  for (std::uint8_t b : bits) {
    if (b > 1) throw std::invalid_argument("bit value must be 0 or 1");
    v = (v << 1) | b;
  }
  return v;
}

BitWord index_to_bits(std::uint32_t value, int nbits) {
  BitWord bits(static_cast<size_t>(nbits));
  for (int i = 0; i < nbits; ++i)
    bits[static_cast<size_t>(i)] = static_cast<std::uint8_t>((value >> (nbits - 1 - i)) & 1u);
  return bits;
}

double Constellation::modulus_variance() const {
  const ArrayX e = points.rowwise().squaredNorm().array();
  return (e - e.mean()).square().mean();
}

void Constellation::validate() const {
  if (bits < 1 || bits > 16) throw std::invalid_argument("constellation bits out of range");
  if (dim < 1) throw std::invalid_argument("constellation dimension must be positive");
  if (points.rows() != (1 << bits))
    throw std::invalid_argument("constellation '" + name + "': point count " +
                                std::to_string(points.rows()) + " != 2^" + std::to_string(bits));
  if (points.cols() != dim)
    throw std::invalid_argument("constellation '" + name + "': coordinate width mismatch");
  if (!points.allFinite())
    throw std::invalid_argument("constellation '" + name + "': non-finite coordinate");
}

Constellation normalized(Constellation c) {
  const double e = c.mean_energy();
  if (e <= 0.0) throw std::invalid_argument("cannot normalize zero-energy constellation");
  c.points *= 1.0 / std::sqrt(e);
  return c;
}

namespace {

// 3-bit Gray-labeled 8QAM, unit mean energy. Label (b1 b2 b3): b1 picks
// the quadrature row, (b2 b3) Gray-select the in-phase column.
MatrixX qam8_rect() {
  const double i_levels[4] = {-3.0, -1.0, 1.0, 3.0};  // Gray column order 00,01,11,10
  MatrixX pts(8, 2);
  for (int v = 0; v < 8; ++v) {
    const int b1 = (v >> 2) & 1;
    const int col = gray_inverse(v & 3, 2);
    pts(v, 0) = i_levels[col];
    pts(v, 1) = b1 ? 1.0 : -1.0;
  }
  pts *= 1.0 / std::sqrt(6.0);
  return pts;
}

// Two-ring 8QAM: inner QPSK on the diagonals, outer QPSK on the axes at
// radius 1+sqrt(3). b1 picks the ring, (b2 b3) Gray-select the quadrant.
MatrixX qam8_star() {
  const double r2 = 1.0 + std::sqrt(3.0);
  MatrixX pts(8, 2);
  for (int v = 0; v < 8; ++v) {
    const int ring = (v >> 2) & 1;
    const int k = gray_inverse(v & 3, 2);
    const double phase = ring ? (2.0 * M_PI * k / 4.0) : (M_PI / 4.0 + 2.0 * M_PI * k / 4.0);
    const double r = ring ? r2 : 1.0;
    pts(v, 0) = r * std::cos(phase);
    pts(v, 1) = r * std::sin(phase);
  }
  pts *= 1.0 / std::sqrt(pts.rowwise().squaredNorm().mean());
  return pts;
}

MatrixX product_4d(const MatrixX& per_pol) {
  const int n = static_cast<int>(per_pol.rows());
  MatrixX pts(n * n, 4);
  for (int vx = 0; vx < n; ++vx)
    for (int vy = 0; vy < n; ++vy) {
      const int row = vx * n + vy;
      pts(row, 0) = per_pol(vx, 0);
      pts(row, 1) = per_pol(vx, 1);
      pts(row, 2) = per_pol(vy, 0);
      pts(row, 3) = per_pol(vy, 1);
    }
  return pts;
}

}  // namespace

Constellation build_pm8qam(const std::string& geometry) {
  MatrixX pol;
  if (geometry == "rect")
    pol = qam8_rect();
  else if (geometry == "star")
    pol = qam8_star();
  else
    throw std::invalid_argument("unknown 8QAM geometry '" + geometry + "' (rect|star)");
  Constellation c;
  c.name = "pm8qam-" + geometry;
  c.dim = 4;
  c.bits = 6;
  c.points = product_4d(pol);
  c = normalized(std::move(c));
  c.validate();
  return c;
}

Constellation build_pmqpsk() {
  MatrixX pol(4, 2);
  for (int v = 0; v < 4; ++v) {
    const int k = gray_inverse(v, 2);
    const double phase = M_PI / 4.0 + 2.0 * M_PI * k / 4.0;
    pol(v, 0) = std::cos(phase);
    pol(v, 1) = std::sin(phase);
  }
  pol *= 1.0 / std::sqrt(2.0);
  Constellation c;
  c.name = "pmqpsk";
  c.dim = 4;
  c.bits = 4;
  c.points = product_4d(pol);
  c = normalized(std::move(c));
  c.validate();
  return c;
}

namespace {

Constellation two_ring_8psk(double ring_ratio, double rotation, int bits, std::string name) {
  if (!(ring_ratio > 0.0 && ring_ratio <= 1.0))
    throw std::invalid_argument("ring_ratio must be in (0, 1]");
  if (bits != 5 && bits != 6) throw std::invalid_argument("2A8PSK bits must be 5 or 6");

  const double outer = 1.0 / std::sqrt(1.0 + ring_ratio * ring_ratio);
  const double inner = ring_ratio * outer;  // outer^2 + inner^2 == 1

  Constellation c;
  c.name = std::move(name);
  c.dim = 4;
  c.bits = bits;
  c.points.resize(1 << bits, 4);
  for (int w = 0; w < (1 << bits); ++w) {
    // 5-bit labels index the even-parity subset of the 6-bit set.
    const int v = bits == 6 ? w : (w << 1) | parity(static_cast<std::uint32_t>(w));
    const int kx = gray_inverse((v >> 3) & 7, 3);
    const int ky = gray_inverse(v & 7, 3);
    const int swap = parity(static_cast<std::uint32_t>(v));
    const double rx = swap ? inner : outer;
    const double ry = swap ? outer : inner;
    const double phix = 2.0 * M_PI * kx / 8.0 + (swap ? rotation : 0.0);
    const double phiy = 2.0 * M_PI * ky / 8.0 + (swap ? 0.0 : rotation);
    set_complex(c.points, w, 0, rx, phix);
    set_complex(c.points, w, 1, ry, phiy);
  }
  c.validate();
  return c;
}

}  // namespace

Constellation build_2a8psk(double ring_ratio, int bits) {
  return two_ring_8psk(ring_ratio, 0.0, bits,
                       "2a8psk-" + std::to_string(bits) + "b");
}

Constellation build_ring_switched(double ring_ratio, double rotation) {
  return two_ring_8psk(ring_ratio, rotation, 6, "ring-switched");
}

Constellation load_constellation(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_content_line = [&](std::string& out) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto end = line.find_last_not_of(" \t\r");
      if (end == std::string::npos) continue;
      line.erase(end + 1);
      out = line;
      return true;
    }
    return false;
  };

  std::string header;
  if (!next_content_line(header)) throw std::invalid_argument("constellation file: empty input");

  Constellation c;
  bool normalize_requested = false;
  {
    std::istringstream hs(header);
    std::string tok;
    bool saw_dim = false, saw_bits = false;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("constellation header: malformed token '" + tok + "'");
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      try {
        if (key == "dim") {
          c.dim = std::stoi(val);
          saw_dim = true;
        } else if (key == "bits") {
          c.bits = std::stoi(val);
          saw_bits = true;
        } else if (key == "normalize") {
          normalize_requested = std::stoi(val) != 0;
        } else if (key == "name") {
          std::string rest;
          std::getline(hs, rest);
          c.name = val + rest;
        } else {
          throw std::invalid_argument("constellation header: unknown key '" + key + "'");
        }
      } catch (const std::logic_error& e) {
        throw std::invalid_argument("constellation header: bad value for '" + key + "'");
      }
    }
    if (!saw_dim || !saw_bits)
      throw std::invalid_argument("constellation header: dim= and bits= are required");
    if (c.bits < 1 || c.bits > 16 || c.dim < 1)
      throw std::invalid_argument("constellation header: dim/bits out of range");
  }

  const int n = 1 << c.bits;
  c.points.resize(n, c.dim);
  std::vector<bool> seen(static_cast<size_t>(n), false);
  int count = 0;
  std::string body;
  while (next_content_line(body)) {
    std::istringstream ls(body);
    std::string label_str;
    ls >> label_str;
    if (static_cast<int>(label_str.size()) != c.bits)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": label '" + label_str +
                                  "' is not " + std::to_string(c.bits) + " binary digits");
    std::uint32_t label = 0;
    for (char ch : label_str) {
      if (ch != '0' && ch != '1')
        throw std::invalid_argument("line " + std::to_string(line_no) + ": label '" + label_str +
                                    "' is not binary");
      label = (label << 1) | static_cast<std::uint32_t>(ch - '0');
    }
    if (seen[label])
      throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate label '" +
                                  label_str + "'");
    seen[label] = true;
    for (int d = 0; d < c.dim; ++d) {
      double x;
      if (!(ls >> x))
        throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(c.dim) + " coordinates");
      if (!std::isfinite(x))
        throw std::invalid_argument("line " + std::to_string(line_no) + ": non-finite coordinate");
      c.points(label, d) = x;
    }
    double extra;
    if (ls >> extra)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": trailing fields");
    ++count;
  }
  if (count != n)
    throw std::invalid_argument("constellation file: expected " + std::to_string(n) +
                                " points, found " + std::to_string(count));
  if (normalize_requested) c = normalized(std::move(c));
  c.validate();
  return c;
}

Constellation load_constellation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open constellation file '" + path + "'");
  try {
    return load_constellation(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_constellation(const Constellation& c, std::ostream& out, bool normalize_flag) {
  out << "dim=" << c.dim << " bits=" << c.bits << " normalize=" << (normalize_flag ? 1 : 0)
      << " name=" << c.name << "\n";
  out.precision(17);
  for (int i = 0; i < c.size(); ++i) {
    for (int b = c.bits - 1; b >= 0; --b) out << ((i >> b) & 1);
    for (int d = 0; d < c.dim; ++d) out << ' ' << c.points(i, d);
    out << "\n";
  }
}

}  // namespace octane
