#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace rca {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

// Free-space wave impedance, ohms.
inline constexpr double kFreeSpaceImpedanceOhm = 376.730313668;

// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286061;

// Validity floor of the side-by-side impedance kernel, in wavelengths.
// Below this separation the Ci log-singularity makes the closed form
// meaningless, independent of any scenario spacing constraint.
inline constexpr double kMinSpacingWavelengths = 0.05;

// Thin straight-wire dipole, sinusoidal current assumption.
struct DipoleSpec {
  double length;      // meters
  double wavelength;  // meters

  static DipoleSpec half_wave(double wavelength) {
    return DipoleSpec{0.5 * wavelength, wavelength};
  }

  double wavenumber() const { return 2.0 * kPi / wavelength; }

  // throws DomainError unless length > 0 and wavelength > 0
  void validate() const;
};

// Per-coupler termination impedances plus the sign convention used when
// solving the passive-port circuit equations (see mechanical_weights).
struct LoadConfig {
  std::vector<Complex> loads;   // ohms, one per coupler
  double sign_convention = -1.0;  // +1 or -1

  static LoadConfig short_circuit(int coupler_count, double sign = -1.0);
  static LoadConfig uniform(int coupler_count, Complex load, double sign = -1.0);
  // purely reactive loads j*x, the ESPAR tuning family
  static LoadConfig reactive(const std::vector<double>& reactances, double sign = -1.0);

  void validate(int expected_count) const;
};

}  // namespace rca
