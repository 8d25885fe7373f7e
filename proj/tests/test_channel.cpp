#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "rca/channel.hpp"
#include "rca/errors.hpp"
#include "rca/rng.hpp"

using namespace rca;

namespace {

const double kLambda = 0.04;
const DipoleSpec kHalfWave = DipoleSpec::half_wave(kLambda);

ArrayLayout canonical_layout() {
  return fixed_coupler_layout(3, 2, 1.2 * kLambda, 0.4 * kLambda, 1.0 * kLambda, 0.1 * kLambda);
}

ArrayLayout actives_only(const ArrayLayout& layout) {
  ArrayLayout bare = layout;
  bare.coupler_positions.clear();
  bare.coupler_owner.clear();
  return bare;
}

}  // namespace

TEST_CASE("sample_pathset: determinism, size, direction norms") {
  const PathSet a = sample_pathset(13, 7);
  const PathSet b = sample_pathset(13, 7);
  REQUIRE(a.paths.size() == 13);
  for (size_t i = 0; i < a.paths.size(); ++i) {
    CHECK(a.paths[i].azimuth == b.paths[i].azimuth);
    CHECK(a.paths[i].elevation == b.paths[i].elevation);
    CHECK(a.paths[i].gain == b.paths[i].gain);
    CHECK(std::abs(a.paths[i].direction().norm() - 1.0) < 1e-12);
    CHECK(a.paths[i].elevation >= -kPi / 3.0);
    CHECK(a.paths[i].elevation <= kPi / 3.0);
  }
  const PathSet single = sample_pathset(1, 5);
  CHECK(single.paths.size() == 1);
  CHECK(std::abs(single.paths[0].direction().norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS((void)sample_pathset(0, 1), DomainError);
}

TEST_CASE("sample_pathset: mean total gain power is unity") {
  double total = 0.0;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    for (const Path& p : sample_pathset(13, static_cast<std::uint64_t>(seed)).paths) {
      total += std::norm(p.gain);
    }
  }
  CHECK(std::abs(total / trials - 1.0) < 0.02);
}

TEST_CASE("port_channel: phase reference and unit-modulus steering") {
  PathSet single;
  single.large_scale_gain = 0.7;
  single.paths = {Path{1.1, 0.4, Complex(0.3, -0.8)}};

  const Complex at_origin = port_channel(single, Vec3(0, 0, 0), kLambda);
  CHECK(std::abs(at_origin - 0.7 * Complex(0.3, -0.8)) < 1e-15);

  const Prng rng(11);
  Prng r = rng;
  for (int i = 0; i < 20; ++i) {
    const Vec3 q(r.uniform(-0.1, 0.1), r.uniform(-0.1, 0.1), r.uniform(-0.1, 0.1));
    CHECK(std::abs(std::abs(port_channel(single, q, kLambda)) - 0.7 * std::abs(Complex(0.3, -0.8)))
          < 1e-12);
  }
}

TEST_CASE("port_channel matches the direct-summation oracle") {
  const PathSet ps = sample_pathset(13, 3);
  Prng rng(23);
  for (int i = 0; i < 25; ++i) {
    const Vec3 q(rng.uniform(-0.08, 0.08), rng.uniform(-0.08, 0.08), 0.0);
    CHECK(std::abs(port_channel(ps, q, kLambda) - oracle::direct_channel_sum(ps, q, kLambda))
          < 1e-12);
  }
}

TEST_CASE("effective channel: no couplers means bare active channels") {
  const ArrayLayout bare = actives_only(canonical_layout());
  const PathSet ps = sample_pathset(13, 9);
  const EffectiveChannel h = effective_channel(bare, ps, LoadConfig::short_circuit(0), kHalfWave);
  REQUIRE(h.h_eff.size() == 3);
  for (int m = 0; m < 3; ++m) {
    CHECK(h.h_eff(m) == port_channel(ps, bare.active_positions[static_cast<size_t>(m)], kLambda));
  }
}

TEST_CASE("effective channel: open-circuit couplers decouple") {
  const ArrayLayout layout = canonical_layout();
  const PathSet ps = sample_pathset(13, 13);
  const CVector bare =
      effective_channel(actives_only(layout), ps, LoadConfig::short_circuit(0), kHalfWave).h_eff;

  const CVector open6 =
      effective_channel(layout, ps, LoadConfig::uniform(6, Complex(0.0, 1e6)), kHalfWave).h_eff;
  const CVector open9 =
      effective_channel(layout, ps, LoadConfig::uniform(6, Complex(0.0, 1e9)), kHalfWave).h_eff;

  const double err6 = (open6 - bare).norm() / bare.norm();
  const double err9 = (open9 - bare).norm() / bare.norm();
  CHECK(err9 < 1e-6);
  CHECK(err9 < err6);
  CHECK(err6 < 1e-3);
}

TEST_CASE("effective channel: canonical M=1 N=2 composition oracle") {
  const ArrayLayout layout = layout_with_couplers(
      1, 2, kLambda, {Vec3(-0.5 * kLambda, 0, 0), Vec3(0.5 * kLambda, 0, 0)}, kLambda,
      0.1 * kLambda);
  const PathSet ps = sample_pathset(13, 21);
  const LoadConfig loads = LoadConfig::short_circuit(2);
  const CVector h = effective_channel(layout, ps, loads, kHalfWave).h_eff;

  // end-to-end recomposition from the per-operation pieces
  const ImpedanceSet set = assemble_impedances(layout, kHalfWave);
  const CMatrix w = set.Zcc.fullPivHouseholderQr().solve(-set.Zac.transpose());
  Complex expected = oracle::direct_channel_sum(ps, layout.active_positions[0], kLambda);
  for (int j = 0; j < 2; ++j) {
    expected += w(j, 0) *
                oracle::direct_channel_sum(ps, layout.coupler_positions[static_cast<size_t>(j)],
                                           kLambda);
  }
  CHECK(std::abs(h(0) - expected) < 1e-10 * std::abs(expected));
}

TEST_CASE("effective channel is reproducible") {
  const ArrayLayout layout = canonical_layout();
  const PathSet ps = sample_pathset(13, 2);
  const LoadConfig loads = LoadConfig::short_circuit(6);
  const CVector a = effective_channel(layout, ps, loads, kHalfWave).h_eff;
  const CVector b = effective_channel(layout, ps, loads, kHalfWave).h_eff;
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("single-path channels have equal magnitude on every port") {
  const ArrayLayout layout = canonical_layout();
  PathSet single = sample_pathset(1, 31);
  const double mag = single.large_scale_gain * std::abs(single.paths[0].gain);
  for (const Vec3& p : layout.active_positions) {
    CHECK(std::abs(std::abs(port_channel(single, p, kLambda)) - mag) < 1e-12);
  }
  for (const Vec3& p : layout.coupler_positions) {
    CHECK(std::abs(std::abs(port_channel(single, p, kLambda)) - mag) < 1e-12);
  }
}

TEST_CASE("snr_and_rate: endpoints, MRT dominance, monotonicity") {
  EffectiveChannel h;
  h.h_eff = CVector::Zero(3);
  h.h_eff(0) = Complex(1.0, 0.0);

  CHECK(snr_and_rate(h, 0.0, 1e-11).snr == 0.0);
  CHECK(snr_and_rate(h, 0.0, 1e-11).rate == 0.0);
  CHECK(snr_and_rate(h, 1.0, 1.0).rate == doctest::Approx(1.0));  // ‖h‖²=1, P/σ²=1
  CHECK_THROWS_AS((void)snr_and_rate(h, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS((void)snr_and_rate(h, -1.0, 1.0), DomainError);

  // MRT beats 100 random unit-norm digital excitations
  const ArrayLayout layout = canonical_layout();
  const PathSet ps = sample_pathset(13, 4);
  const CVector heff = effective_channel(layout, ps, LoadConfig::short_circuit(6), kHalfWave).h_eff;
  const double mrt = heff.squaredNorm();
  Prng rng(77);
  for (int i = 0; i < 100; ++i) {
    CVector v(heff.size());
    for (int m = 0; m < v.size(); ++m) v(m) = rng.complex_normal(1.0);
    v /= v.norm();
    const double received = std::norm(heff.cwiseProduct(v).sum());
    CHECK(received <= mrt * (1.0 + 1e-12));
  }

  // rate nondecreasing in transmit power
  double last = -1.0;
  for (double p : {0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0}) {
    const double rate = snr_and_rate(EffectiveChannel{heff}, p, 1e-11).rate;
    CHECK(rate >= last);
    last = rate;
  }
}

TEST_CASE("phase-reference invariance of the effective channel norm") {
  const ArrayLayout layout = canonical_layout();
  PathSet ps = sample_pathset(13, 6);
  const LoadConfig loads = LoadConfig::short_circuit(6);
  const double norm0 = effective_channel(layout, ps, loads, kHalfWave).h_eff.norm();

  const Complex rot = std::polar(1.0, 1.234);
  for (Path& p : ps.paths) p.gain *= rot;
  const double norm1 = effective_channel(layout, ps, loads, kHalfWave).h_eff.norm();
  CHECK(std::abs(norm0 - norm1) < 1e-12 * norm0);
}

TEST_CASE("gain map: inert coupler gives a flat map") {
  const ArrayLayout layout = layout_with_couplers(1, 1, kLambda, {Vec3(0.4 * kLambda, 0, 0)},
                                                  kLambda, 0.1 * kLambda);
  const PathSet ps = sample_pathset(13, 8);
  const GainMap map =
      gain_map(layout, ps, LoadConfig::uniform(1, Complex(0.0, 1e9)), kHalfWave, 0, 21);
  CHECK(map.spread_db() < 1e-6);
}

TEST_CASE("gain map: cells match pointwise effective-channel evaluations") {
  const ArrayLayout layout = layout_with_couplers(
      1, 2, kLambda, {Vec3(-0.5 * kLambda, 0, 0), Vec3(0.5 * kLambda, 0, 0)}, kLambda,
      0.1 * kLambda);
  const PathSet ps = sample_pathset(13, 10);
  const LoadConfig loads = LoadConfig::short_circuit(2);
  const GainMap map = gain_map(layout, ps, loads, kHalfWave, 0, 15);

  ArrayLayout probe = layout;
  for (int iy = 0; iy < 15; ++iy) {
    for (int ix = 0; ix < 15; ++ix) {
      const Vec3 pos(map.xs(ix), map.ys(iy), 0.0);
      bool feasible = true;
      for (int j = 1; j < 2 && feasible; ++j) {
        feasible = (pos - layout.coupler_positions[1]).norm() >= layout.d_min - 1e-9;
      }
      if (feasible) {
        feasible = (pos - layout.active_positions[0]).norm() >= layout.d_min - 1e-9;
      }
      CHECK(map.masked(iy, ix) == !feasible);
      if (!feasible) continue;
      probe.coupler_positions[0] = pos;
      const double expected =
          10.0 * std::log10(effective_channel(probe, ps, loads, kHalfWave).h_eff.squaredNorm());
      CHECK(map.gain_db(iy, ix) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("gain map rejects bad coupler indices") {
  const ArrayLayout layout = canonical_layout();
  const PathSet ps = sample_pathset(13, 1);
  CHECK_THROWS_AS((void)gain_map(layout, ps, LoadConfig::short_circuit(6), kHalfWave, 6, 11),
                  DomainError);
  CHECK_THROWS_AS((void)gain_map(layout, ps, LoadConfig::short_circuit(6), kHalfWave, -1, 11),
                  DomainError);
}
