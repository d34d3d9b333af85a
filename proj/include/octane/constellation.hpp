#pragma once

#include "octane/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace octane {

// b1 first (most significant position).
using BitWord = std::vector<std::uint8_t>;

std::uint32_t bits_to_index(const BitWord& bits);
BitWord index_to_bits(std::uint32_t value, int nbits);

// A labeled point set in `dim` real dimensions. Rows of `points` are
// stored in label order: row i carries the label whose b1..bm spell the
// integer i, so the label list is implicit and distinct by construction.
// Loaders reject duplicate labels before canonicalizing to this layout.
struct Constellation {
  std::string name;
  int dim = 0;
  int bits = 0;
  MatrixX points;  // 2^bits rows, dim cols

  int size() const { return static_cast<int>(points.rows()); }
  double mean_energy() const { return points.rowwise().squaredNorm().mean(); }
  // Variance of per-point squared norms; ~0 for constant-modulus sets.
  double modulus_variance() const;
  BitWord label(int index) const { return index_to_bits(static_cast<std::uint32_t>(index), bits); }

  // Structural checks: 2^bits points, coordinate width, finiteness.
  void validate() const;
};

inline constexpr double kEnergyTol = 1e-12;

// Scales to unit mean energy per slot. Idempotent within 1e-15.
Constellation normalized(Constellation c);

// Dual-polarisation product of a 3-bit 8QAM per polarisation.
// geometry: "rect" (2x4 grid, default) or "star" (4+4 two-ring).
Constellation build_pm8qam(const std::string& geometry = "rect");

// Dual-polarisation product of Gray QPSK per polarisation (4 bits).
Constellation build_pmqpsk();

// Two-ring 8PSK per polarisation with complementary ring assignment, so
// every 4D point has identical norm. m=6 is the full 64-point set with
// the ring pairing selected by the label parity; m=5 is its even-parity
// 32-point subset (b6 = b1^..^b5) relabeled by the five leading bits.
Constellation build_2a8psk(double ring_ratio, int bits);

// Like build_2a8psk with the inner-ring 8PSK rotated by `rotation`
// radians. The polarisation-ring-switched point sets used as parity-
// format bases come from this family.
Constellation build_ring_switched(double ring_ratio, double rotation);

// Text format: header `dim=<d> bits=<m> normalize=<0|1> name=<string>`,
// then 2^m lines of `<m binary digits> <coord_1> ... <coord_d>`.
// '#' starts a comment.
Constellation load_constellation(std::istream& in);
Constellation load_constellation_file(const std::string& path);
void write_constellation(const Constellation& c, std::ostream& out, bool normalize_flag = false);

// Tuned default for the 2A8PSK family (see docs/README): argmax of AWGN
// GMI of the 1:1 time-hybrid block at its NGMI=0.85 operating SNR,
// located by a golden-section search over (0.3, 1.0).
inline constexpr double kDefaultRingRatio = 0.65;

}  // namespace octane
