#pragma once

namespace rca {

struct SiCi {
  double si;
  double ci;
};

// Si(u) = ∫₀ᵘ sin(t)/t dt.  Defined for all finite u, odd in u.
// Absolute accuracy better than 1e-12 everywhere.
double sine_integral(double u);

// Ci(u) = -∫ᵤ^∞ cos(t)/t dt, u > 0.  Logarithmic singularity at u = 0;
// non-positive arguments are a domain error.
double cosine_integral(double u);

// Both integrals at once for u > 0 (the impedance kernels always need the
// pair at the same argument).
SiCi sine_cosine_integral(double u);

namespace detail {

// Maclaurin series route, accurate for 0 < u <= ~8; Ci comes via
// Cin(u) = γ + ln(u) - Ci(u).
SiCi si_ci_series(double u);

// Auxiliary-function route for u >= ~2: the complex exponential integral
// E1(iu) evaluated by a modified-Lentz continued fraction, then
// Ci(u) = -Re E1(iu), Si(u) = π/2 + Im E1(iu).
SiCi si_ci_continued_fraction(double u);

}  // namespace detail

}  // namespace rca
