#include "octane/format.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace octane {

int FormatSpec::block_bits() const {
  switch (kind) {
    case Kind::Plain4D:
      return slots[0].bits;
    case Kind::Parity8D:
    case Kind::TimeHybrid:
      return 11;
  }
  return 0;
}

int FormatSpec::block_slots() const { return kind == Kind::Plain4D ? 1 : 2; }

int parity_bit(ParityType type, std::uint32_t info11) {
  if (info11 >= (1u << 11)) throw std::invalid_argument("information word exceeds 11 bits");
  std::uint32_t masked = info11;
  if (type == ParityType::T2) {
    // b3, b6, b9 with b1 in the MSB: bit positions 8, 5, 2 from the LSB.
    masked = info11 & ((1u << 8) | (1u << 5) | (1u << 2));
  }
  return 1 ^ (std::popcount(masked) & 1);
}

int parity_bit(ParityType type, const BitWord& info) {
  if (info.size() != 11) throw std::invalid_argument("parity_bit: information word must have 11 bits");
  return parity_bit(type, bits_to_index(info));
}

std::uint32_t parity8d_codeword(ParityType type, std::uint32_t info11) {
  return (info11 << 1) | static_cast<std::uint32_t>(parity_bit(type, info11));
}

FormatSpec make_plain4d(Constellation c) {
  c.validate();
  if (c.dim != 4) throw std::invalid_argument("Plain4D requires a 4-dimensional constellation");
  FormatSpec f;
  f.kind = FormatSpec::Kind::Plain4D;
  f.name = c.name;
  f.slots.push_back(std::move(c));
  return f;
}

FormatSpec extend_to_8d(Constellation base, ParityType type) {
  base.validate();
  if (base.dim != 4 || base.bits != 6 || base.size() != 64)
    throw std::invalid_argument("Parity8D base must be a 64-point 4D constellation with 6-bit labels");
  FormatSpec f;
  f.kind = FormatSpec::Kind::Parity8D;
  f.parity = type;
  f.name = "parity8d-" + std::string(type == ParityType::T1 ? "t1" : "t2") + "(" + base.name + ")";
  f.slots.push_back(std::move(base));
  return f;
}

FormatSpec build_time_hybrid(Constellation slot_a, Constellation slot_b) {
  slot_a.validate();
  slot_b.validate();
  if (slot_a.bits != 5 || slot_b.bits != 6)
    throw std::invalid_argument("time hybrid requires a 5-bit slot A and a 6-bit slot B");
  if (slot_a.dim != 4 || slot_b.dim != 4)
    throw std::invalid_argument("time hybrid slots must be 4-dimensional");
  FormatSpec f;
  f.kind = FormatSpec::Kind::TimeHybrid;
  f.name = "th(" + slot_a.name + "," + slot_b.name + ")";
  f.slots.push_back(std::move(slot_a));
  f.slots.push_back(std::move(slot_b));
  return f;
}

SymbolStream map_bits(const FormatSpec& fmt, const std::vector<std::uint8_t>& bits) {
  const int bb = fmt.block_bits();
  if (bits.size() % static_cast<size_t>(bb) != 0)
    throw std::invalid_argument("bit count " + std::to_string(bits.size()) +
                                " is not a multiple of the block size " + std::to_string(bb));
  const long n_blocks = static_cast<long>(bits.size()) / bb;
  SymbolStream out(n_blocks * fmt.block_slots(), 4);

  auto word_at = [&](long block, int offset, int width) {
    std::uint32_t v = 0;
    for (int i = 0; i < width; ++i) {
      const std::uint8_t b = bits[static_cast<size_t>(block) * bb + offset + i];
      if (b > 1) throw std::invalid_argument("bit value must be 0 or 1");
      v = (v << 1) | b;
    }
    return v;
  };

  for (long n = 0; n < n_blocks; ++n) {
    switch (fmt.kind) {
      case FormatSpec::Kind::Plain4D:
        out.row(n) = fmt.slots[0].points.row(word_at(n, 0, bb));
        break;
      case FormatSpec::Kind::Parity8D: {
        const std::uint32_t cw = parity8d_codeword(fmt.parity, word_at(n, 0, 11));
        out.row(2 * n) = fmt.slots[0].points.row((cw >> 6) & 63u);
        out.row(2 * n + 1) = fmt.slots[0].points.row(cw & 63u);
        break;
      }
      case FormatSpec::Kind::TimeHybrid:
        out.row(2 * n) = fmt.slots[0].points.row(word_at(n, 0, 5));
        out.row(2 * n + 1) = fmt.slots[1].points.row(word_at(n, 5, 6));
        break;
    }
  }
  return out;
}

MatrixX block_codebook(const FormatSpec& fmt) {
  const int d = fmt.block_slots() * 4;
  const int n = 1 << fmt.block_bits();
  MatrixX cb(n, d);
  for (int w = 0; w < n; ++w) {
    switch (fmt.kind) {
      case FormatSpec::Kind::Plain4D:
        cb.row(w) = fmt.slots[0].points.row(w);
        break;
      case FormatSpec::Kind::Parity8D: {
        const std::uint32_t cw = parity8d_codeword(fmt.parity, static_cast<std::uint32_t>(w));
        cb.block(w, 0, 1, 4) = fmt.slots[0].points.row((cw >> 6) & 63u);
        cb.block(w, 4, 1, 4) = fmt.slots[0].points.row(cw & 63u);
        break;
      }
      case FormatSpec::Kind::TimeHybrid:
        cb.block(w, 0, 1, 4) = fmt.slots[0].points.row(w >> 6);
        cb.block(w, 4, 1, 4) = fmt.slots[1].points.row(w & 63);
        break;
    }
  }
  return cb;
}

std::vector<DemapSegment> demap_segments(const FormatSpec& fmt) {
  std::vector<DemapSegment> segs;
  switch (fmt.kind) {
    case FormatSpec::Kind::Plain4D:
      segs.push_back({fmt.slots[0].points, fmt.slots[0].bits, 0, 1, 0});
      break;
    case FormatSpec::Kind::Parity8D:
      segs.push_back({block_codebook(fmt), 11, 0, 2, 0});
      break;
    case FormatSpec::Kind::TimeHybrid:
      segs.push_back({fmt.slots[0].points, 5, 0, 1, 0});
      segs.push_back({fmt.slots[1].points, 6, 1, 1, 5});
      break;
  }
  return segs;
}

std::vector<std::uint8_t> hard_decision(const FormatSpec& fmt, const SymbolStream& slots) {
  const int bs = fmt.block_slots();
  if (slots.rows() % bs != 0)
    throw std::invalid_argument("slot count is not a multiple of the block length");
  const long n_blocks = slots.rows() / bs;
  const auto segs = demap_segments(fmt);
  std::vector<std::uint8_t> bits(static_cast<size_t>(n_blocks) * fmt.block_bits());

  for (const DemapSegment& seg : segs) {
    const int d = seg.slot_count * 4;
    for (long n = 0; n < n_blocks; ++n) {
      Eigen::RowVectorXd y(d);
      for (int s = 0; s < seg.slot_count; ++s)
        y.segment(4 * s, 4) = slots.row(n * bs + seg.slot_offset + s);
      int best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (int j = 0; j < seg.codebook.rows(); ++j) {
        const double d2 = (seg.codebook.row(j) - y).squaredNorm();
        if (d2 < best_d2) {  // strict: ties keep the lowest label
          best_d2 = d2;
          best = j;
        }
      }
      for (int i = 0; i < seg.bits; ++i)
        bits[static_cast<size_t>(n) * fmt.block_bits() + seg.bit_offset + i] =
            static_cast<std::uint8_t>((best >> (seg.bits - 1 - i)) & 1);
    }
  }
  return bits;
}

double min_euclidean_distance(const FormatSpec& fmt) {
  const MatrixX cb = block_codebook(fmt);
  const long n = cb.rows();
  if (n > (1 << 16)) throw std::invalid_argument("codeword space too large to enumerate");
  const VectorX sq = cb.rowwise().squaredNorm();
  // d2(i,j) = |xi|^2 + |xj|^2 - 2 xi.xj via one Gram product.
  const MatrixX gram = cb * cb.transpose();
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) {
      const double d2 = sq(i) + sq(j) - 2.0 * gram(i, j);
      if (d2 < best) best = d2;
    }
  return std::sqrt(std::max(best, 0.0));
}

long polarisation_identical_count(const FormatSpec& fmt) {
  const MatrixX cb = block_codebook(fmt);
  const double tol = 1e-12;
  long count = 0;
  for (long w = 0; w < cb.rows(); ++w) {
    bool identical = true;
    for (int s = 0; s < fmt.block_slots() && identical; ++s) {
      identical = std::abs(cb(w, 4 * s + 0) - cb(w, 4 * s + 2)) < tol &&
                  std::abs(cb(w, 4 * s + 1) - cb(w, 4 * s + 3)) < tol;
    }
    if (identical) ++count;
  }
  return count;
}

}  // namespace octane
