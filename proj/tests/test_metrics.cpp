#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "octane/metrics.hpp"
#include "octane/rng.hpp"

#include <cmath>

using namespace octane;

namespace {

Constellation fixture() {
  return load_constellation_file(std::string(OCTANE_DATA_DIR) + "/4d64prs.txt");
}

Constellation qpsk2d() {
  Constellation c;
  c.name = "qpsk";
  c.dim = 2;
  c.bits = 2;
  c.points.resize(4, 2);
  const double s = 1.0 / std::sqrt(2.0);
  // Gray ring: labels 00,01,11,10 at consecutive quadrants.
  c.points << s, s, -s, s, -s, -s, s, -s;
  return c;
}

// Second, independent integrator for the QPSK reference: plain
// rectangle rule over the noise plane.
double qpsk_mi_grid(const Constellation& c, double snr_db) {
  const double sigma2 = noise_variance_per_dim(snr_db, 2);
  const double lim = 6.0 * std::sqrt(sigma2);
  const int n = 401;
  const double h = 2.0 * lim / (n - 1);
  double mi = std::log2(4.0);
  for (int i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double nx = -lim + a * h, ny = -lim + b * h;
        const double pn = std::exp(-(nx * nx + ny * ny) / (2.0 * sigma2)) /
                          (2.0 * M_PI * sigma2);
        double denom = 0.0;
        for (int j = 0; j < 4; ++j) {
          const double dx = nx + c.points(i, 0) - c.points(j, 0);
          const double dy = ny + c.points(i, 1) - c.points(j, 1);
          denom += std::exp(-(dx * dx + dy * dy) / (2.0 * sigma2));
        }
        acc += pn * std::log2(denom / std::exp(-(nx * nx + ny * ny) / (2.0 * sigma2))) * h * h;
      }
    mi -= acc / 4.0;
  }
  return mi;
}

}  // namespace

TEST_CASE("bit_llrs: sign matches the transmitted label at high SNR") {
  const Constellation c = build_pm8qam();
  NoiseModel noise{1e-6 / 4.0};
  for (int v : {0, 17, 42, 63}) {
    const ArrayX llr = bit_llrs(c, c.points.row(v).transpose(), noise);
    for (int k = 0; k < 6; ++k) {
      const int bit = (v >> (5 - k)) & 1;
      CHECK((bit == 0 ? llr(k) > 0.0 : llr(k) < 0.0));
    }
  }
}

TEST_CASE("bit_llrs: equidistant point gives zero max-log LLR") {
  Constellation c;
  c.name = "pair";
  c.dim = 2;
  c.bits = 1;
  c.points.resize(2, 2);
  c.points << 1, 0, -1, 0;
  VectorX y(2);
  y << 0.0, 0.4;
  const ArrayX llr = bit_llrs(c, y, NoiseModel{0.1}, LlrMethod::MaxLog);
  CHECK(std::abs(llr(0)) < 1e-9);
}

TEST_CASE("bit_llrs: exact and max-log differ by at most log(2^(m-1))") {
  const Constellation c = build_pm8qam();
  const double bound = std::log(std::pow(2.0, c.bits - 1)) + 1e-9;
  Rng rng(5);
  NoiseModel noise{noise_variance_per_dim(7.0)};
  for (int t = 0; t < 10000; ++t) {
    VectorX y(4);
    for (int d = 0; d < 4; ++d) y(d) = rng.normal();
    const ArrayX ex = bit_llrs(c, y, noise, LlrMethod::Exact);
    const ArrayX ml = bit_llrs(c, y, noise, LlrMethod::MaxLog);
    CHECK((ex - ml).abs().maxCoeff() <= bound);
  }
}

TEST_CASE("bit_llrs: dimension mismatch") {
  VectorX y(2);
  y << 0, 0;
  CHECK_THROWS_AS(bit_llrs(build_pm8qam(), y, NoiseModel{0.1}), std::invalid_argument);
}

TEST_CASE("LLR consistency: complementing one bit level negates its LLR") {
  const Constellation c = build_pm8qam();
  const int k = 2;
  Constellation flipped = c;
  // Complement bit k of every label: permute point rows accordingly.
  for (int v = 0; v < c.size(); ++v) {
    const int w = v ^ (1 << (c.bits - 1 - k));
    flipped.points.row(v) = c.points.row(w);
  }
  Rng rng(11);
  NoiseModel noise{noise_variance_per_dim(6.0)};
  for (int t = 0; t < 50; ++t) {
    VectorX y(4);
    for (int d = 0; d < 4; ++d) y(d) = rng.normal();
    const ArrayX a = bit_llrs(c, y, noise);
    const ArrayX b = bit_llrs(flipped, y, noise);
    for (int j = 0; j < c.bits; ++j)
      CHECK(b(j) == doctest::Approx(j == k ? -a(j) : a(j)).epsilon(1e-9));
  }
}

TEST_CASE("gmi_monte_carlo: noiseless limit reaches m bits") {
  const FormatSpec f = make_plain4d(build_pmqpsk());
  const GmiReport r = gmi_monte_carlo(f, 35.0, 10000, 1);
  CHECK(r.gmi == doctest::Approx(4.0).epsilon(0.01 / 4.0));
  CHECK(r.ngmi == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("gmi_monte_carlo: deterministic per seed and worker count") {
  const FormatSpec f = extend_to_8d(fixture(), ParityType::T1);
  const GmiReport a = gmi_monte_carlo(f, 9.0, 6000, 42, 1);
  const GmiReport b = gmi_monte_carlo(f, 9.0, 6000, 42, 1);
  const GmiReport c = gmi_monte_carlo(f, 9.0, 6000, 42, 4);
  CHECK(a.gmi == b.gmi);
  CHECK(a.gmi == c.gmi);
  CHECK(a.ngmi == c.ngmi);
  CHECK((a.per_bit_mi == c.per_bit_mi).all());
  const GmiReport d = gmi_monte_carlo(f, 9.0, 6000, 43, 1);
  CHECK(a.gmi != d.gmi);
}

TEST_CASE("gmi_monte_carlo: rejects tiny sample counts") {
  CHECK_THROWS_AS(gmi_monte_carlo(make_plain4d(build_pmqpsk()), 10.0, 500, 1),
                  std::invalid_argument);
}

TEST_CASE("gmi report invariants") {
  const FormatSpec f = extend_to_8d(fixture(), ParityType::T2);
  const GmiReport r = gmi_monte_carlo(f, 8.0, 20000, 7);
  CHECK(r.m == 11);
  CHECK(r.n_blocks == 20000);
  CHECK(r.per_bit_mi.size() == 11);
  CHECK(r.per_bit_mi.minCoeff() >= 0.0);
  CHECK(r.per_bit_mi.maxCoeff() <= 1.0);
  CHECK(r.gmi == doctest::Approx(r.per_bit_mi.sum()).epsilon(1e-9));
  CHECK(r.ngmi == doctest::Approx(r.gmi / 11.0).epsilon(1e-12));
}

TEST_CASE("ngmi_from_gmi") {
  CHECK(ngmi_from_gmi(9.35, 11) == doctest::Approx(0.85));
  CHECK(ngmi_from_gmi(11.0, 11) == doctest::Approx(1.0));
  CHECK(ngmi_from_gmi(0.0, 11) == doctest::Approx(0.0));
  CHECK_THROWS_AS(ngmi_from_gmi(-0.5, 11), std::invalid_argument);
  CHECK_THROWS_AS(ngmi_from_gmi(12.0, 11), std::invalid_argument);
}

TEST_CASE("mi_reference: limits") {
  const Constellation q = qpsk2d();
  CHECK(mi_reference(q, -40.0) <= 0.01);
  CHECK(mi_reference(q, 40.0) == doctest::Approx(2.0).epsilon(0.01 / 2.0));
  const Constellation pm = build_pm8qam();
  CHECK(mi_reference(pm, -40.0) <= 0.01);
  CHECK(mi_reference(pm, 40.0) == doctest::Approx(6.0).epsilon(0.01 / 6.0));
}

TEST_CASE("mi_reference: QPSK at 5 dB matches an independent integrator") {
  const Constellation q = qpsk2d();
  const double quad = mi_reference(q, 5.0);
  const double grid = qpsk_mi_grid(q, 5.0);
  CHECK(quad == doctest::Approx(grid).epsilon(1e-3));
}

TEST_CASE("mi_reference: unsupported dimension") {
  Constellation c;
  c.name = "line";
  c.dim = 1;
  c.bits = 1;
  c.points.resize(2, 1);
  c.points << 1, -1;
  CHECK_THROWS_AS(mi_reference(c, 5.0), std::invalid_argument);
}

TEST_CASE("GMI is bounded by the symbol-wise MI reference") {
  // GMI <= MI for matched decoding metrics; two-slot formats are bounded
  // by the sum of their per-slot references.
  const double snrs[] = {0.0, 5.0, 10.0, 15.0};
  const Constellation prs = fixture();
  const FormatSpec f_t1 = extend_to_8d(prs, ParityType::T1);
  const FormatSpec f_pm = make_plain4d(build_pm8qam());
  const FormatSpec f_th = build_time_hybrid(build_2a8psk(0.65, 5), build_2a8psk(0.65, 6));
  for (double snr : snrs) {
    const double mi4 = mi_reference(prs, snr);
    const GmiReport t1 = gmi_monte_carlo(f_t1, snr, 20000, 3);
    CHECK(t1.gmi <= 2.0 * mi4 + 2.0 * t1.gmi_se);

    const GmiReport pm = gmi_monte_carlo(f_pm, snr, 20000, 3);
    CHECK(pm.gmi <= mi_reference(f_pm.slots[0], snr) + 2.0 * pm.gmi_se);

    const GmiReport th = gmi_monte_carlo(f_th, snr, 20000, 3);
    CHECK(th.gmi <= mi_reference(f_th.slots[0], snr) + mi_reference(f_th.slots[1], snr) +
                        2.0 * th.gmi_se);
  }
}

TEST_CASE("required_snr: reaches extreme targets and orders T1/T2") {
  const Constellation prs = fixture();
  const FormatSpec t1 = extend_to_8d(prs, ParityType::T1);
  const FormatSpec t2 = extend_to_8d(prs, ParityType::T2);

  const double high = required_snr(t1, 0.999, 10.0, 25.0, 20000, 2);
  CHECK(std::isfinite(high));
  CHECK(gmi_monte_carlo(t1, high + 0.5, 20000, 2).ngmi >= 0.999);

  // T2 is the low-SNR format, T1 the high-SNR one.
  const double lo1 = required_snr(t1, 0.80, 4.0, 14.0, 30000, 2);
  const double lo2 = required_snr(t2, 0.80, 4.0, 14.0, 30000, 2);
  CHECK(lo2 < lo1);
  const double hi1 = required_snr(t1, 0.92, 4.0, 14.0, 30000, 2);
  const double hi2 = required_snr(t2, 0.92, 4.0, 14.0, 30000, 2);
  CHECK(hi1 < hi2);

  CHECK_THROWS_AS(required_snr(t1, 0.85, 14.0, 16.0, 20000, 2), std::invalid_argument);
}

TEST_CASE("estimator convergence: 10 seeds at N=1e5 spread below 0.01 bit") {
  const FormatSpec pm = make_plain4d(build_pm8qam());
  double mean = 0.0, sq = 0.0;
  const int k = 10;
  for (int s = 0; s < k; ++s) {
    const double g = gmi_monte_carlo(pm, 10.0, 100000, 100 + s).gmi;
    mean += g;
    sq += g * g;
  }
  mean /= k;
  const double sd = std::sqrt(std::max(0.0, sq / k - mean * mean));
  CHECK(sd < 0.01);
}
