#include <complex>
#include <cstring>

#include <doctest.h>

#include "oracles.hpp"
#include "rca/errors.hpp"
#include "rca/impedance.hpp"
#include "rca/rng.hpp"

using namespace rca;

namespace {

const double kLambda = 0.04;
const DipoleSpec kHalfWave = DipoleSpec::half_wave(kLambda);

ArrayLayout canonical_m1n2() {
  // one active at the origin, couplers at ±0.5λ on the x axis
  return layout_with_couplers(1, 2, kLambda,
                              {Vec3(-0.5 * kLambda, 0, 0), Vec3(0.5 * kLambda, 0, 0)},
                              1.0 * kLambda, 0.1 * kLambda);
}

}  // namespace

TEST_CASE("half-wave self impedance hits the canonical value") {
  const Complex z = self_impedance(kHalfWave);
  CHECK(std::abs(z.real() - 73.13) < 0.1);
  CHECK(std::abs(z.imag() - 42.54) < 0.1);
  // against the frozen high-precision evaluation and the quadrature oracle
  CHECK(std::abs(z - Complex(73.0790102856713854, 42.5151147058110647)) < 1e-9);
  CHECK(std::abs(z - oracle::self_impedance_quad(kHalfWave)) < 1e-9);
}

TEST_CASE("quarter-wave self impedance matches the quadrature oracle") {
  const DipoleSpec quarter{0.25 * kLambda, kLambda};
  const Complex z = self_impedance(quarter);
  CHECK(std::abs(z - oracle::self_impedance_quad(quarter)) < 1e-9);
  CHECK(std::abs(z - Complex(49.4141205044162555, 55.5196761179022581)) < 1e-9);
}

TEST_CASE("self impedance is deterministic") {
  const Complex a = self_impedance(kHalfWave);
  const Complex b = self_impedance(kHalfWave);
  CHECK(a.real() == b.real());
  CHECK(a.imag() == b.imag());
}

TEST_CASE("side-by-side mutual impedance golden values") {
  const Complex z_half = mutual_impedance_side_by_side(0.5 * kLambda, kHalfWave);
  CHECK(std::abs(z_half.real() - (-12.53)) < 0.1);
  CHECK(std::abs(z_half.imag() - (-29.93)) < 0.1);
  CHECK(std::abs(z_half - Complex(-12.523407452487986, -29.907935934661548)) < 1e-9);
  CHECK(std::abs(z_half - oracle::mutual_impedance_quad(0.5 * kLambda, kHalfWave)) < 1e-9);

  const Complex z_one = mutual_impedance_side_by_side(1.0 * kLambda, kHalfWave);
  CHECK(std::abs(z_one.real() - 4.01) < 0.1);
  CHECK(std::abs(z_one.imag() - 17.73) < 0.1);
  CHECK(std::abs(z_one - Complex(4.0088556925160533, 17.729755291014104)) < 1e-9);
  CHECK(std::abs(z_one - oracle::mutual_impedance_quad(1.0 * kLambda, kHalfWave)) < 1e-9);
}

TEST_CASE("mutual impedance decays with separation") {
  const double z_half = std::abs(mutual_impedance_side_by_side(0.5 * kLambda, kHalfWave));
  const double z_ten = std::abs(mutual_impedance_side_by_side(10.0 * kLambda, kHalfWave));
  const double z_hundred = std::abs(mutual_impedance_side_by_side(100.0 * kLambda, kHalfWave));
  CHECK(z_ten < z_half);
  CHECK(z_hundred < z_ten);
  CHECK(z_hundred < 1.0);
}

TEST_CASE("mutual impedance rejects separations below the model floor") {
  CHECK_THROWS_AS((void)mutual_impedance_side_by_side(0.049 * kLambda, kHalfWave), SpacingError);
  CHECK_NOTHROW((void)mutual_impedance_side_by_side(0.05 * kLambda, kHalfWave));
  CHECK_THROWS_AS((void)mutual_impedance_side_by_side(std::nan(""), kHalfWave), DomainError);
}

TEST_CASE("assemble: single active, no couplers") {
  ArrayLayout layout;
  layout.active_positions = {Vec3(0, 0, 0)};
  layout.region_half_width = kLambda;
  layout.d_min = 0.1 * kLambda;
  const ImpedanceSet set = assemble_impedances(layout, kHalfWave);
  CHECK(set.Zaa.rows() == 1);
  CHECK(set.Zaa(0, 0) == self_impedance(kHalfWave));
  CHECK(set.Zac.cols() == 0);
  CHECK(set.Zcc.rows() == 0);
}

TEST_CASE("assemble: canonical M=1 N=2 block values") {
  const ArrayLayout layout = canonical_m1n2();
  const ImpedanceSet set = assemble_impedances(layout, kHalfWave);

  CHECK(set.Zaa.rows() == 1);
  CHECK(set.Zac.rows() == 1);
  CHECK(set.Zac.cols() == 2);
  CHECK(set.Zcc.rows() == 2);

  const Complex at_half = mutual_impedance_side_by_side(0.5 * kLambda, kHalfWave);
  const Complex at_one = mutual_impedance_side_by_side(1.0 * kLambda, kHalfWave);
  CHECK(std::abs(set.Zac(0, 0) - at_half) < 1e-10);
  CHECK(std::abs(set.Zac(0, 1) - at_half) < 1e-10);
  CHECK(std::abs(set.Zcc(0, 1) - at_one) < 1e-10);
  CHECK(set.Zcc(0, 0) == self_impedance(kHalfWave));
  CHECK(set.Zcc(1, 1) == self_impedance(kHalfWave));
}

TEST_CASE("assemble: reciprocity and permutation invariance") {
  const ArrayLayout layout = fixed_coupler_layout(3, 2, 1.2 * kLambda, 0.4 * kLambda,
                                                  1.0 * kLambda, 0.1 * kLambda);
  const ImpedanceSet set = assemble_impedances(layout, kHalfWave);
  CHECK((set.Zcc - set.Zcc.transpose()).norm() == 0.0);
  CHECK((set.Zaa - set.Zaa.transpose()).norm() == 0.0);
  for (int i = 0; i < set.Zcc.rows(); ++i) {
    CHECK(set.Zcc(i, i) == self_impedance(kHalfWave));
  }

  // swap the two couplers of RCA 0
  ArrayLayout permuted = layout;
  std::swap(permuted.coupler_positions[0], permuted.coupler_positions[1]);
  const ImpedanceSet pset = assemble_impedances(permuted, kHalfWave);
  CHECK(pset.Zcc(0, 0) == set.Zcc(1, 1));
  CHECK(pset.Zcc(0, 1) == set.Zcc(1, 0));
  CHECK(pset.Zac(0, 0) == set.Zac(0, 1));
  for (int j = 2; j < set.Zcc.rows(); ++j) {
    CHECK(pset.Zcc(0, j) == set.Zcc(1, j));
    CHECK(pset.Zcc(1, j) == set.Zcc(0, j));
  }
}

TEST_CASE("assemble rejects infeasible layouts naming the pair") {
  ArrayLayout layout = canonical_m1n2();
  layout.coupler_positions[1] = layout.coupler_positions[0] + Vec3(0.05 * kLambda, 0, 0);
  try {
    (void)assemble_impedances(layout, kHalfWave);
    FAIL("expected SpacingError");
  } catch (const SpacingError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("0") != std::string::npos);
    CHECK(msg.find("1") != std::string::npos);
  }
}

TEST_CASE("mechanical weights: empty and scalar systems") {
  ArrayLayout no_couplers;
  no_couplers.active_positions = {Vec3(0, 0, 0), Vec3(0.6 * kLambda, 0, 0)};
  no_couplers.region_half_width = kLambda;
  no_couplers.d_min = 0.1 * kLambda;
  const ImpedanceSet empty = assemble_impedances(no_couplers, kHalfWave);
  const MechanicalWeights w0 = mechanical_weights(empty, LoadConfig::short_circuit(0));
  CHECK(w0.W.rows() == 0);
  CHECK(w0.W.cols() == 2);

  // single coupler, single active: W = s z̄ / (Zcc + X)
  ArrayLayout single = layout_with_couplers(1, 1, kLambda, {Vec3(0.3 * kLambda, 0, 0)},
                                            kLambda, 0.1 * kLambda);
  const ImpedanceSet set = assemble_impedances(single, kHalfWave);
  const Complex load(0.0, 25.0);
  LoadConfig loads = LoadConfig::uniform(1, load);
  const MechanicalWeights w = mechanical_weights(set, loads);
  const Complex expected = -set.Zac(0, 0) / (set.Zcc(0, 0) + load);
  CHECK(std::abs(w.W(0, 0) - expected) < 1e-14 * std::abs(expected));

  loads.sign_convention = 1.0;
  const MechanicalWeights wp = mechanical_weights(set, loads);
  CHECK(std::abs(wp.W(0, 0) + expected) < 1e-14 * std::abs(expected));
}

TEST_CASE("mechanical weights match an independent dense solve") {
  const ArrayLayout layout = canonical_m1n2();
  const ImpedanceSet set = assemble_impedances(layout, kHalfWave);
  const LoadConfig loads = LoadConfig::short_circuit(2);
  const MechanicalWeights w = mechanical_weights(set, loads);

  // independent route: full-pivot Householder QR instead of partial-pivot LU
  CMatrix system = set.Zcc;
  const CMatrix rhs = -set.Zac.transpose();
  const CMatrix w_oracle = system.fullPivHouseholderQr().solve(rhs);
  CHECK((w.W - w_oracle).norm() / w_oracle.norm() < 1e-10);
}

TEST_CASE("weight-system residual stays below 1e-10 on random feasible layouts") {
  const ArrayLayout base = fixed_coupler_layout(3, 2, 1.2 * kLambda, 0.4 * kLambda,
                                                1.0 * kLambda, 0.1 * kLambda);
  const Prng rng(991);
  for (int trial = 0; trial < 100; ++trial) {
    const ArrayLayout layout = random_feasible_layout(base, rng.fold_in(trial));
    const ImpedanceSet set = assemble_impedances(layout, kHalfWave);
    const LoadConfig loads = LoadConfig::short_circuit(6);
    const MechanicalWeights w = mechanical_weights(set, loads);
    CHECK(weights_residual(set, loads, w) < 1e-10);
  }
}

TEST_CASE("mechanical weights raise a conditioning error on singular systems") {
  ArrayLayout single = layout_with_couplers(1, 1, kLambda, {Vec3(0.3 * kLambda, 0, 0)},
                                            kLambda, 0.1 * kLambda);
  const ImpedanceSet set = assemble_impedances(single, kHalfWave);
  LoadConfig loads;
  loads.loads = {-set.Zcc(0, 0)};  // exactly cancels the 1x1 system
  CHECK_THROWS_AS((void)mechanical_weights(set, loads), ConditioningError);

  // near-singular 2x2: equal loads x with Zcc + xI having an eigenvalue ~0
  const ArrayLayout pair = canonical_m1n2();
  const ImpedanceSet pset = assemble_impedances(pair, kHalfWave);
  LoadConfig near;
  const Complex x = -(pset.Zcc(0, 0) + pset.Zcc(0, 1));
  near.loads = {x, x};
  CHECK_THROWS_AS((void)mechanical_weights(pset, near), ConditioningError);
}

TEST_CASE("assembly and weights are bit-deterministic") {
  const ArrayLayout layout = fixed_coupler_layout(3, 2, 1.2 * kLambda, 0.4 * kLambda,
                                                  1.0 * kLambda, 0.1 * kLambda);
  const ImpedanceSet a = assemble_impedances(layout, kHalfWave);
  const ImpedanceSet b = assemble_impedances(layout, kHalfWave);
  CHECK(std::memcmp(a.Zcc.data(), b.Zcc.data(),
                    sizeof(Complex) * static_cast<size_t>(a.Zcc.size())) == 0);
  CHECK(std::memcmp(a.Zac.data(), b.Zac.data(),
                    sizeof(Complex) * static_cast<size_t>(a.Zac.size())) == 0);
  const MechanicalWeights wa = mechanical_weights(a, LoadConfig::short_circuit(6));
  const MechanicalWeights wb = mechanical_weights(b, LoadConfig::short_circuit(6));
  CHECK(std::memcmp(wa.W.data(), wb.W.data(),
                    sizeof(Complex) * static_cast<size_t>(wa.W.size())) == 0);
}
