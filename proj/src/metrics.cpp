#include "octane/metrics.hpp"

#include "octane/executor.hpp"
#include "octane/isotonic.hpp"
#include "octane/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace octane {

namespace {

constexpr long kChunkBlocks = 2048;
constexpr double kTinySum = 1e-300;

// log2(1 + e^u), stable for |u| up to the LLR clamp.
double softplus2(double u) {
  if (u > 0.0) return (u + std::log1p(std::exp(-u))) / M_LN2;
  return std::log1p(std::exp(u)) / M_LN2;
}

struct GmiPartial {
  ArrayX bit_loss;
  double loss_sum = 0.0;
  double loss_sumsq = 0.0;
  long n = 0;
};

// Per-bit losses of received blocks for one segment, accumulated against
// the transmitted words. Shared by the AWGN estimator and the link path.
void accumulate_segment(const DemapSegment& seg, const MatrixX& received,
                        const std::vector<std::uint32_t>& tx_words, double sigma2,
                        GmiPartial& acc, ArrayX& block_loss) {
  const MatrixX llrs = batch_llrs(seg, received, sigma2, LlrMethod::Exact);
  const long n = received.rows();
  for (long i = 0; i < n; ++i) {
    const std::uint32_t word = tx_words[static_cast<size_t>(i)];
    for (int k = 0; k < seg.bits; ++k) {
      const int bit = (word >> (seg.bits - 1 - k)) & 1;
      const double u = bit ? llrs(i, k) : -llrs(i, k);
      const double loss = softplus2(u);
      acc.bit_loss(seg.bit_offset + k) += loss;
      block_loss(i) += loss;
    }
  }
}

}  // namespace

double noise_variance_per_dim(double snr_db, int dims_per_slot) {
  if (dims_per_slot < 1) throw std::invalid_argument("dims_per_slot must be positive");
  return std::pow(10.0, -snr_db / 10.0) / dims_per_slot;
}

MatrixX batch_llrs(const DemapSegment& seg, const MatrixX& received, double sigma2,
                   LlrMethod method) {
  if (received.cols() != seg.codebook.cols())
    throw std::invalid_argument("received dimension does not match the codebook");
  if (sigma2 <= 0.0) throw std::invalid_argument("noise variance must be positive");

  const long n = received.rows();
  const long m_points = seg.codebook.rows();
  const double inv2s = 1.0 / (2.0 * sigma2);
  MatrixX llrs(n, seg.bits);

  // Label-bit masks, one 0/1 column pair per bit level.
  MatrixX mask0(m_points, seg.bits), mask1(m_points, seg.bits);
  for (long j = 0; j < m_points; ++j)
    for (int k = 0; k < seg.bits; ++k) {
      const bool one = (static_cast<std::uint32_t>(j) >> (seg.bits - 1 - k)) & 1u;
      mask0(j, k) = one ? 0.0 : 1.0;
      mask1(j, k) = one ? 1.0 : 0.0;
    }

  const VectorX cb_sq = seg.codebook.rowwise().squaredNorm();
  const long stripe = std::max<long>(1, (1 << 21) / std::max<long>(m_points, 1));
  MatrixX t;  // stripe x M metric matrix
  for (long row = 0; row < n; row += stripe) {
    const long nr = std::min(stripe, n - row);
    const auto y = received.middleRows(row, nr);
    t.noalias() = y * seg.codebook.transpose();
    t *= 2.0;
    t.colwise() -= y.rowwise().squaredNorm();
    t.rowwise() -= cb_sq.transpose();
    t *= inv2s;  // t(i,j) = -|y_i - x_j|^2 / (2 sigma^2)

    if (method == LlrMethod::Exact) {
      const VectorX row_max = t.rowwise().maxCoeff();
      t.colwise() -= row_max;
      t = t.array().exp().matrix();
      MatrixX s0 = t * mask0;
      MatrixX s1 = t * mask1;
      llrs.middleRows(row, nr) = (s0.array().max(kTinySum).log() -
                                  s1.array().max(kTinySum).log()).matrix();
    } else {
      for (long i = 0; i < nr; ++i)
        for (int k = 0; k < seg.bits; ++k) {
          double m0 = -std::numeric_limits<double>::infinity();
          double m1 = m0;
          for (long j = 0; j < m_points; ++j) {
            if (mask0(j, k) != 0.0)
              m0 = std::max(m0, t(i, j));
            else
              m1 = std::max(m1, t(i, j));
          }
          llrs(row + i, k) = m0 - m1;
        }
    }
  }
  return llrs;
}

ArrayX bit_llrs(const Constellation& c, const VectorX& received, NoiseModel noise,
                LlrMethod method) {
  c.validate();
  if (received.size() != c.dim)
    throw std::invalid_argument("received vector dimension does not match the constellation");
  if (noise.variance_per_dim <= 0.0)
    throw std::invalid_argument("noise variance must be positive");
  DemapSegment seg{c.points, c.bits, 0, c.dim / 4, 0};
  MatrixX y(1, c.dim);
  y.row(0) = received.transpose();
  return batch_llrs(seg, y, noise.variance_per_dim, method).row(0).array();
}

namespace {

GmiReport finalize_report(const FormatSpec& fmt, const GmiPartial& acc, double snr_db) {
  const int m = fmt.block_bits();
  GmiReport r;
  r.m = m;
  r.n_blocks = acc.n;
  r.snr_db = snr_db;
  r.per_bit_mi = (1.0 - acc.bit_loss / static_cast<double>(acc.n)).cwiseMax(0.0).cwiseMin(1.0);
  r.gmi = r.per_bit_mi.sum();
  r.ngmi = ngmi_from_gmi(r.gmi, m);
  const double mean = acc.loss_sum / static_cast<double>(acc.n);
  const double var =
      std::max(0.0, acc.loss_sumsq / static_cast<double>(acc.n) - mean * mean);
  r.gmi_se = std::sqrt(var / static_cast<double>(acc.n));
  return r;
}

}  // namespace

GmiReport gmi_monte_carlo(const FormatSpec& fmt, double snr_db, long n_blocks,
                          std::uint64_t seed, int workers) {
  if (n_blocks < 1000) throw std::invalid_argument("gmi_monte_carlo requires n_blocks >= 1000");
  const auto segs = demap_segments(fmt);
  const int m = fmt.block_bits();
  const int n_slots = fmt.block_slots();
  const double sigma2 = noise_variance_per_dim(snr_db);
  const double sigma = std::sqrt(sigma2);

  const long n_chunks = (n_blocks + kChunkBlocks - 1) / kChunkBlocks;
  std::vector<GmiPartial> partials(static_cast<size_t>(n_chunks));

  parallel_for(static_cast<int>(n_chunks), workers, [&](int ci) {
    const long count = std::min(kChunkBlocks, n_blocks - ci * kChunkBlocks);
    Rng rng(derive_seed(seed, {hash_key("gmi-chunk"), static_cast<std::uint64_t>(ci)}));

    std::vector<std::uint32_t> words(static_cast<size_t>(count));
    MatrixX rx(count * n_slots, 4);
    for (long i = 0; i < count; ++i) {
      words[static_cast<size_t>(i)] = rng.word(m);
      for (int s = 0; s < n_slots; ++s)
        for (int d = 0; d < 4; ++d) rx(i * n_slots + s, d) = sigma * rng.normal();
    }
    // Noise drawn first, then the clean block added on top.
    std::vector<std::uint8_t> bits(static_cast<size_t>(count) * m);
    for (long i = 0; i < count; ++i)
      for (int k = 0; k < m; ++k)
        bits[static_cast<size_t>(i) * m + k] =
            static_cast<std::uint8_t>((words[static_cast<size_t>(i)] >> (m - 1 - k)) & 1u);
    rx += map_bits(fmt, bits);

    GmiPartial acc;
    acc.bit_loss = ArrayX::Zero(m);
    acc.n = count;
    ArrayX block_loss = ArrayX::Zero(count);
    for (const DemapSegment& seg : segs) {
      MatrixX y(count, seg.slot_count * 4);
      for (long i = 0; i < count; ++i)
        for (int s = 0; s < seg.slot_count; ++s)
          y.block(i, 4 * s, 1, 4) = rx.row(i * n_slots + seg.slot_offset + s);
      std::vector<std::uint32_t> seg_words(static_cast<size_t>(count));
      const std::uint32_t mask = (1u << seg.bits) - 1u;
      const int shift = m - seg.bit_offset - seg.bits;
      for (long i = 0; i < count; ++i)
        seg_words[static_cast<size_t>(i)] = (words[static_cast<size_t>(i)] >> shift) & mask;
      accumulate_segment(seg, y, seg_words, sigma2, acc, block_loss);
    }
    acc.loss_sum = block_loss.sum();
    acc.loss_sumsq = block_loss.square().sum();
    partials[static_cast<size_t>(ci)] = std::move(acc);
  });

  GmiPartial total;
  total.bit_loss = ArrayX::Zero(m);
  for (const GmiPartial& p : partials) {  // fixed chunk order: reduction is exact
    total.bit_loss += p.bit_loss;
    total.loss_sum += p.loss_sum;
    total.loss_sumsq += p.loss_sumsq;
    total.n += p.n;
  }
  return finalize_report(fmt, total, snr_db);
}

GmiReport gmi_from_blocks(const FormatSpec& fmt, const SymbolStream& rx,
                          const std::vector<std::uint32_t>& tx_words, double sigma2,
                          double snr_db) {
  const int n_slots = fmt.block_slots();
  if (rx.rows() % n_slots != 0)
    throw std::invalid_argument("slot count is not a multiple of the block length");
  const long n = rx.rows() / n_slots;
  if (static_cast<size_t>(n) != tx_words.size())
    throw std::invalid_argument("transmitted word count mismatch");
  const int m = fmt.block_bits();

  GmiPartial acc;
  acc.bit_loss = ArrayX::Zero(m);
  acc.n = n;
  ArrayX block_loss = ArrayX::Zero(n);
  for (const DemapSegment& seg : demap_segments(fmt)) {
    MatrixX y(n, seg.slot_count * 4);
    for (long i = 0; i < n; ++i)
      for (int s = 0; s < seg.slot_count; ++s)
        y.block(i, 4 * s, 1, 4) = rx.row(i * n_slots + seg.slot_offset + s);
    std::vector<std::uint32_t> seg_words(static_cast<size_t>(n));
    const std::uint32_t mask = (1u << seg.bits) - 1u;
    const int shift = m - seg.bit_offset - seg.bits;
    for (long i = 0; i < n; ++i)
      seg_words[static_cast<size_t>(i)] = (tx_words[static_cast<size_t>(i)] >> shift) & mask;
    accumulate_segment(seg, y, seg_words, sigma2, acc, block_loss);
  }
  acc.loss_sum = block_loss.sum();
  acc.loss_sumsq = block_loss.square().sum();
  return finalize_report(fmt, acc, snr_db);
}

double ngmi_from_gmi(double gmi, int m) {
  if (m < 1) throw std::invalid_argument("m must be positive");
  if (gmi < -1e-12 || gmi > m + 1e-12)
    throw std::invalid_argument("gmi outside [0, m]");
  return std::clamp(gmi / m, 0.0, 1.0);
}

namespace {

// Hermite nodes/weights from the Jacobi matrix (Golub-Welsch),
// physicists' convention: integral of e^{-t^2} f(t) dt ~ sum w_a f(t_a).
void gauss_hermite(int order, ArrayX& nodes, ArrayX& weights) {
  MatrixX jacobi = MatrixX::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<MatrixX> es(jacobi);
  nodes = es.eigenvalues().array();
  weights = std::sqrt(M_PI) * es.eigenvectors().row(0).transpose().array().square();
}

}  // namespace

double mi_reference(const Constellation& c, double snr_db) {
  c.validate();
  if (c.dim != 2 && c.dim != 4)
    throw std::invalid_argument("mi_reference supports dimensions 2 and 4");
  if (c.size() > 256) throw std::invalid_argument("mi_reference supports up to 256 points");

  const double sigma2 = noise_variance_per_dim(snr_db, c.dim) * c.mean_energy();
  const int order = c.dim == 2 ? 24 : 12;
  ArrayX t1, w1;
  gauss_hermite(order, t1, w1);

  // Tensor grid of noise nodes, scaled to N(0, sigma^2) per dimension.
  const int d = c.dim;
  long n_nodes = 1;
  for (int i = 0; i < d; ++i) n_nodes *= order;
  MatrixX nodes(n_nodes, d);
  ArrayX logw = ArrayX::Zero(n_nodes);
  const double scale = std::sqrt(2.0 * sigma2);
  for (long a = 0; a < n_nodes; ++a) {
    long rest = a;
    for (int i = 0; i < d; ++i) {
      const long idx = rest % order;
      rest /= order;
      nodes(a, i) = scale * t1(idx);
      logw(a) += std::log(w1(idx));
    }
  }
  const ArrayX w = (logw - d * 0.5 * std::log(M_PI)).exp();  // normalized weights

  const int m_points = c.size();
  const double inv2s = 1.0 / (2.0 * sigma2);
  double mi = std::log2(static_cast<double>(m_points));
  MatrixX expo(n_nodes, m_points);
  for (int i = 0; i < m_points; ++i) {
    // exponent(a, j) = -(2 n.D + |D|^2) / (2 sigma^2), D = x_i - x_j
    MatrixX delta = (-c.points).rowwise() + c.points.row(i);
    expo.noalias() = nodes * delta.transpose();
    expo *= 2.0;
    expo.rowwise() += delta.rowwise().squaredNorm().transpose();
    expo *= -inv2s;
    const VectorX row_max = expo.rowwise().maxCoeff();
    expo.colwise() -= row_max;
    const ArrayX lse = expo.array().exp().rowwise().sum().log() + row_max.array();
    mi -= (w * lse).sum() / (m_points * M_LN2);
  }
  return mi;
}

double required_snr(const FormatSpec& fmt, double target_ngmi, double low_db, double high_db,
                    long n_blocks, std::uint64_t seed) {
  if (!(target_ngmi > 0.0 && target_ngmi < 1.0))
    throw std::invalid_argument("target NGMI must lie strictly inside (0, 1)");
  if (!(low_db < high_db)) throw std::invalid_argument("invalid SNR bracket");

  std::vector<std::pair<double, double>> samples;  // (snr, ngmi), kept sorted
  auto eval = [&](double snr) {
    const GmiReport r = gmi_monte_carlo(fmt, snr, n_blocks, seed);
    const auto pos = std::lower_bound(samples.begin(), samples.end(),
                                      std::make_pair(snr, -1.0));
    samples.insert(pos, {snr, r.ngmi});
  };
  auto fitted_at = [&](double snr) {
    ArrayX y(static_cast<Eigen::Index>(samples.size()));
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      y(i) = samples[static_cast<size_t>(i)].second;
      if (samples[static_cast<size_t>(i)].first == snr) at = i;
    }
    return isotonic_fit(y, true)(at);
  };

  eval(low_db);
  eval(high_db);
  if (!(fitted_at(low_db) < target_ngmi && target_ngmi <= fitted_at(high_db)))
    throw std::invalid_argument("bracket does not straddle the target NGMI");

  double lo = low_db, hi = high_db;
  for (int it = 0; it < 30; ++it) {
    if (hi - lo < 0.05) return 0.5 * (lo + hi);
    const double mid = 0.5 * (lo + hi);
    eval(mid);
    if (fitted_at(mid) >= target_ngmi)
      hi = mid;
    else
      lo = mid;
  }
  throw std::runtime_error("required_snr did not converge after 30 iterations");
}

}  // namespace octane
