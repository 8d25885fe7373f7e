#include "rca/impedance.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "rca/errors.hpp"
#include "rca/special_functions.hpp"

namespace rca {

namespace {

constexpr double kEtaOver4Pi = kFreeSpaceImpedanceOhm / (4.0 * kPi);

}  // namespace

Complex self_impedance(const DipoleSpec& spec) {
  spec.validate();
  const double two_kl = 2.0 * spec.wavenumber() * spec.length;
  const SiCi sc = sine_cosine_integral(two_kl);
  const double r = kEtaOver4Pi * (kEulerGamma + std::log(two_kl) - sc.ci);
  const double x = kEtaOver4Pi * sc.si;
  return Complex(r, x);
}

Complex mutual_impedance_side_by_side(double d, const DipoleSpec& spec) {
  spec.validate();
  if (!std::isfinite(d)) throw DomainError("mutual_impedance: non-finite separation");
  const double floor = kMinSpacingWavelengths * spec.wavelength;
  if (d < floor) {
    throw SpacingError("mutual_impedance: separation " + std::to_string(d) +
                       " m below model floor " + std::to_string(floor) + " m");
  }
  const double k = spec.wavenumber();
  const double l = spec.length;
  const double hyp = std::sqrt(d * d + l * l);
  const SiCi s0 = sine_cosine_integral(k * d);
  const SiCi s1 = sine_cosine_integral(k * (hyp + l));
  const SiCi s2 = sine_cosine_integral(k * (hyp - l));
  const double r = kEtaOver4Pi * (2.0 * s0.ci - s1.ci - s2.ci);
  const double x = -kEtaOver4Pi * (2.0 * s0.si - s1.si - s2.si);
  return Complex(r, x);
}

ImpedanceSet assemble_impedances(const ArrayLayout& layout, const DipoleSpec& spec) {
  require_feasible(layout);
  const int m = layout.active_count();
  const int n = layout.coupler_count();
  const Complex zs = self_impedance(spec);

  ImpedanceSet set;
  set.Zaa = CMatrix::Zero(m, m);
  set.Zac = CMatrix::Zero(m, n);
  set.Zcc = CMatrix::Zero(n, n);

  auto mutual = [&](const Vec3& a, const Vec3& b) {
    return mutual_impedance_side_by_side((a - b).norm(), spec);
  };

  for (int i = 0; i < m; ++i) {
    set.Zaa(i, i) = zs;
    for (int j = i + 1; j < m; ++j) {
      const Complex z = mutual(layout.active_positions[i], layout.active_positions[j]);
      set.Zaa(i, j) = z;
      set.Zaa(j, i) = z;
    }
    for (int j = 0; j < n; ++j) {
      set.Zac(i, j) = mutual(layout.active_positions[i], layout.coupler_positions[j]);
    }
  }
  for (int i = 0; i < n; ++i) {
    set.Zcc(i, i) = zs;
    for (int j = i + 1; j < n; ++j) {
      const Complex z = mutual(layout.coupler_positions[i], layout.coupler_positions[j]);
      set.Zcc(i, j) = z;
      set.Zcc(j, i) = z;
    }
  }
  return set;
}

MechanicalWeights mechanical_weights(const ImpedanceSet& Z, const LoadConfig& loads) {
  const int n = static_cast<int>(Z.Zcc.rows());
  const int m = static_cast<int>(Z.Zaa.rows());
  loads.validate(n);

  MechanicalWeights out;
  out.sign = loads.sign_convention;
  if (n == 0) {
    out.W = CMatrix::Zero(0, m);
    return out;
  }

  CMatrix system = Z.Zcc;
  for (int i = 0; i < n; ++i) system(i, i) += loads.loads[static_cast<size_t>(i)];

  Eigen::PartialPivLU<CMatrix> lu(system);
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / kConditionLimit)) {
    throw ConditioningError("mechanical_weights: condition estimate " +
                            std::to_string(rcond > 0.0 ? 1.0 / rcond : INFINITY) +
                            " exceeds limit");
  }
  out.W = loads.sign_convention * lu.solve(Z.Zac.transpose());
  return out;
}

double weights_residual(const ImpedanceSet& Z, const LoadConfig& loads,
                        const MechanicalWeights& weights) {
  const int n = static_cast<int>(Z.Zcc.rows());
  CMatrix system = Z.Zcc;
  for (int i = 0; i < n; ++i) system(i, i) += loads.loads[static_cast<size_t>(i)];
  const CMatrix rhs = loads.sign_convention * Z.Zac.transpose();
  const double denom = rhs.norm();
  if (denom == 0.0) return 0.0;
  return (system * weights.W - rhs).norm() / denom;
}

}  // namespace rca
