#include "rca/special_functions.hpp"

#include <cmath>
#include <complex>

#include "rca/errors.hpp"
#include "rca/types.hpp"

namespace rca {
namespace detail {

SiCi si_ci_series(double u) {
  //   Si(u)  = Σ_{k>=0} (-1)^k u^{2k+1} / ((2k+1)(2k+1)!)
  //   Cin(u) = Σ_{k>=1} (-1)^{k+1} u^{2k} / (2k (2k)!)
  const double z = u * u;
  double p = u;    // u^{2k+1} / (2k+1)!
  double q = 1.0;  // u^{2k}   / (2k)!
  double si = u;
  double cin = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 64; ++k) {
    q *= z / ((2.0 * k - 1.0) * (2.0 * k));
    p *= z / ((2.0 * k) * (2.0 * k + 1.0));
    sign = -sign;
    const double dcin = -sign * q / (2.0 * k);
    const double dsi = sign * p / (2.0 * k + 1.0);
    cin += dcin;
    si += dsi;
    if (std::abs(dsi) + std::abs(dcin) < 1e-18) break;
  }
  return {si, kEulerGamma + std::log(u) - cin};
}

SiCi si_ci_continued_fraction(double u) {
  // E1(iu) = e^{-iu} / (iu + 1 - 1/(iu + 3 - 4/(iu + 5 - 9/(...))))
  // evaluated with the modified Lentz algorithm.
  using C = std::complex<double>;
  constexpr double kTiny = 1e-300;
  const C z(0.0, u);
  C b = z + 1.0;
  C c = 1.0 / kTiny;
  C d = 1.0 / b;
  C h = d;
  for (int i = 1; i <= 256; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const C delta = c * d;
    h *= delta;
    if (std::abs(delta.real() - 1.0) + std::abs(delta.imag()) < 1e-16) break;
  }
  const C e1 = h * C(std::cos(u), -std::sin(u));
  return {kPi / 2.0 + e1.imag(), -e1.real()};
}

}  // namespace detail

SiCi sine_cosine_integral(double u) {
  return u <= 4.0 ? detail::si_ci_series(u) : detail::si_ci_continued_fraction(u);
}

double sine_integral(double u) {
  if (!std::isfinite(u)) throw DomainError("sine_integral: non-finite argument");
  if (u == 0.0) return 0.0;
  const double s = sine_cosine_integral(std::abs(u)).si;
  return u < 0.0 ? -s : s;
}

double cosine_integral(double u) {
  if (!std::isfinite(u)) throw DomainError("cosine_integral: non-finite argument");
  if (u <= 0.0) {
    throw DomainError("cosine_integral: argument must be positive (log singularity at 0)");
  }
  return sine_cosine_integral(u).ci;
}

}  // namespace rca
