#pragma once

#include "octane/format.hpp"
#include "octane/types.hpp"

#include <cstdint>

namespace octane {

struct NoiseModel {
  double variance_per_dim = 0.0;  // sigma^2 per real dimension, linear power
};

enum class LlrMethod { Exact, MaxLog };

struct GmiReport {
  ArrayX per_bit_mi;   // bit per bit level, clamped to [0, 1]
  double gmi = 0.0;    // bit per block; equals per_bit_mi.sum()
  double ngmi = 0.0;   // gmi / m
  double snr_db = 0.0; // nominal (AWGN runs) or estimated (link runs)
  double gmi_se = 0.0; // standard error of the Monte-Carlo gmi estimate
  int m = 0;           // information bits per block
  long n_blocks = 0;
};

// SNR is defined per 4D time slot against unit mean slot energy, so
// sigma^2 = 10^(-snr/10) / 4 per real dimension. For 2D constellations
// used in metric tests the same convention scales with the dimension.
double noise_variance_per_dim(double snr_db, int dims_per_slot = 4);

// Per-bit-level log-likelihood ratios of one received vector against a
// label-ordered constellation: positive favors bit 0. Exact uses
// max-stabilized log-sum-exp; MaxLog keeps only the dominant term.
ArrayX bit_llrs(const Constellation& c, const VectorX& received, NoiseModel noise,
                LlrMethod method = LlrMethod::Exact);

// Batched demapper: LLRs (rows x seg.bits) of many received blocks
// against a segment codebook.
MatrixX batch_llrs(const DemapSegment& seg, const MatrixX& received, double sigma2,
                   LlrMethod method = LlrMethod::Exact);

// Monte-Carlo GMI over an AWGN channel at the given SNR per 4D slot.
// Blocks are drawn in fixed chunks with per-chunk derived seeds, so the
// result is bit-identical for any worker count.
GmiReport gmi_monte_carlo(const FormatSpec& fmt, double snr_db, long n_blocks,
                          std::uint64_t seed, int workers = 1);

// GMI of observed slot blocks (link receiver path): rx holds block_slots
// rows per block, tx_words the transmitted information words.
GmiReport gmi_from_blocks(const FormatSpec& fmt, const SymbolStream& rx,
                          const std::vector<std::uint32_t>& tx_words, double sigma2,
                          double snr_db);

double ngmi_from_gmi(double gmi, int m);

// Symbol-wise mutual information by tensor Gauss-Hermite quadrature over
// the Gaussian noise density; deterministic, sampling-free. Upper
// reference for the GMI estimator (GMI <= MI). Dimensions 2 and 4.
double mi_reference(const Constellation& c, double snr_db);

// Smallest SNR at which the isotonic-smoothed Monte-Carlo NGMI reaches
// the target; bisection with common random numbers until the bracket is
// narrower than 0.05 dB.
double required_snr(const FormatSpec& fmt, double target_ngmi, double low_db, double high_db,
                    long n_blocks = 100000, std::uint64_t seed = 1);

}  // namespace octane
