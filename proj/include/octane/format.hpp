#pragma once

#include "octane/constellation.hpp"
#include "octane/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace octane {

enum class ParityType { T1, T2 };

// Mapping from bit blocks to 4D time-slot sequences. Plain4D consumes m
// bits per slot; Parity8D consumes 11 information bits per two slots of
// its 64-point base (the 12th label bit is the parity overhead bit);
// TimeHybrid alternates a 5-bit and a 6-bit slot in a 1:1 cycle.
struct FormatSpec {
  enum class Kind { Plain4D, Parity8D, TimeHybrid };

  Kind kind = Kind::Plain4D;
  std::vector<Constellation> slots;
  ParityType parity = ParityType::T1;
  std::string name;

  int block_bits() const;
  int block_slots() const;
  double bits_per_4d() const { return static_cast<double>(block_bits()) / block_slots(); }
};

// Overhead bit closing the stated parity equation: returns
// b12 = 1 ^ (b1^...^b11) for T1 and b12 = 1 ^ (b3^b6^b9) for T2.
int parity_bit(ParityType type, const BitWord& info);
int parity_bit(ParityType type, std::uint32_t info11);  // b1 in the MSB of 11

FormatSpec make_plain4d(Constellation c);
FormatSpec extend_to_8d(Constellation base, ParityType type);
FormatSpec build_time_hybrid(Constellation slot_a, Constellation slot_b);

// 12-bit codeword label of an 11-bit information word.
std::uint32_t parity8d_codeword(ParityType type, std::uint32_t info11);

SymbolStream map_bits(const FormatSpec& fmt, const std::vector<std::uint8_t>& bits);

// Nearest-codeword inverse of map_bits; distance ties break toward the
// lowest label index.
std::vector<std::uint8_t> hard_decision(const FormatSpec& fmt, const SymbolStream& slots);

// Minimum pairwise distance over the format's full block codeword space
// (8D for Parity8D and TimeHybrid).
double min_euclidean_distance(const FormatSpec& fmt);

// Codewords whose X and Y polarisation symbols coincide in every slot of
// the block.
long polarisation_identical_count(const FormatSpec& fmt);

// Joint-demapping view: each segment is an independently decodable span
// of block bits with its own codebook (row index == information word).
// Parity8D is a single 2048x8 segment because the parity bit couples the
// two slots; TimeHybrid factorizes into its two 4D slots.
struct DemapSegment {
  MatrixX codebook;
  int bits = 0;
  int slot_offset = 0;
  int slot_count = 0;
  int bit_offset = 0;
};

std::vector<DemapSegment> demap_segments(const FormatSpec& fmt);

// Block codeword matrix (block_slots*4 columns) with one row per block
// codeword, ordered by information word.
MatrixX block_codebook(const FormatSpec& fmt);

}  // namespace octane
