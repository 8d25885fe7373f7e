#include <cmath>
#include <limits>

#include <doctest.h>

#include "oracles.hpp"
#include "rca/errors.hpp"
#include "rca/special_functions.hpp"

using rca::cosine_integral;
using rca::sine_integral;

namespace {

struct Reference {
  double u, si, ci;
};

// frozen from a 25-digit evaluation of the defining integrals
constexpr Reference kReference[] = {
    {0.1, 0.0999444611082769502, -1.72786838665729664},
    {0.25, 0.249133570319757164, -0.824663062580945653},
    {0.5, 0.493107418043066689, -0.177784078806612901},
    {1.0, 0.946083070367183015, 0.337403922900968135},
    {2.0, 1.60541297680269485, 0.422980828774864996},
    {3.0, 1.84865252799946826, 0.119629786008000328},
    {3.9, 1.77650136044780544, -0.123499349207815143},
    {3.99, 1.76008929843148659, -0.139336094325308434},
    {4.0, 1.75820313894905306, -0.140981697886930412},
    {4.01, 1.75630536837333449, -0.142604296301446314},
    {4.1, 1.73874362649176893, -0.15616539182812111},
    {5.0, 1.54993124494467414, -0.190029749656643879},
    {6.0, 1.42468755128050654, -0.0680572438932471262},
    {7.5845, 1.52134178479223726, 0.119069269346377623},
    {8.0, 1.57418682170694205, 0.122433882532009557},
    {10.0, 1.65834759421887405, -0.0454564330044553726},
    {13.0, 1.49936172286282456, 0.026764125564034555},
    {20.0, 1.54824170104343984, 0.0444198208453533165},
    {31.7, 1.54029718175926499, 0.00787421884112587293},
    {50.0, 1.55161707248593589, -0.00562838632411630544},
    {100.0, 1.56222546688905629, -0.00514882514261049214},
    {628.2, 1.56921595400888177, -0.000190756796919041276},
    {1000.0, 1.57023312196877122, 0.000826315511090682282},
};

}  // namespace

TEST_CASE("sine/cosine integrals match the frozen reference table") {
  for (const Reference& r : kReference) {
    CHECK(std::abs(sine_integral(r.u) - r.si) < 1e-12);
    CHECK(std::abs(cosine_integral(r.u) - r.ci) < 1e-12);
  }
}

TEST_CASE("sine/cosine integrals agree with the quadrature oracle") {
  for (double u : {0.05, 0.3, 0.7, 1.0, 1.9, 3.14159, 4.5, 6.2, 9.0, 12.5, 18.0}) {
    CHECK(std::abs(sine_integral(u) - oracle::si_quad(u)) < 1e-10);
    CHECK(std::abs(cosine_integral(u) - oracle::ci_quad(u)) < 1e-10);
  }
}

TEST_CASE("sine integral: endpoints and named values") {
  CHECK(sine_integral(0.0) == 0.0);
  CHECK(std::abs(sine_integral(1.0) - 0.9460830704) < 1e-9);
  CHECK(std::abs(sine_integral(1.0) - oracle::si_quad(1.0)) < 1e-10);
  CHECK(std::abs(sine_integral(rca::kPi) - 1.8519370) < 1e-6);
  CHECK(std::abs(sine_integral(rca::kPi) - oracle::si_quad(rca::kPi)) < 1e-10);
}

TEST_CASE("sine integral is odd") {
  for (const Reference& r : kReference) {
    CHECK(sine_integral(-r.u) == -sine_integral(r.u));
  }
}

TEST_CASE("cosine integral: small-argument and asymptotic behavior") {
  CHECK(std::abs(cosine_integral(1.0) - oracle::ci_series(1.0)) < 1e-10);
  CHECK(std::abs(cosine_integral(1e-6) - (rca::kEulerGamma + std::log(1e-6))) < 1e-10);
  CHECK(std::abs(cosine_integral(1000.0)) < 1e-3);
  // leading asymptotic term sin(u)/u dominates by u^-2
  CHECK(std::abs(cosine_integral(1000.0) - std::sin(1000.0) / 1000.0) < 2e-6);
}

TEST_CASE("series and continued-fraction routes agree across the seam") {
  for (double u = 2.0; u <= 8.0; u += 0.25) {
    const rca::SiCi a = rca::detail::si_ci_series(u);
    const rca::SiCi b = rca::detail::si_ci_continued_fraction(u);
    CHECK(std::abs(a.si - b.si) < 1e-12);
    CHECK(std::abs(a.ci - b.ci) < 1e-12);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS((void)sine_integral(std::numeric_limits<double>::quiet_NaN()), rca::DomainError);
  CHECK_THROWS_AS((void)sine_integral(std::numeric_limits<double>::infinity()), rca::DomainError);
  CHECK_THROWS_AS((void)cosine_integral(0.0), rca::DomainError);
  CHECK_THROWS_AS((void)cosine_integral(-1.0), rca::DomainError);
  CHECK_THROWS_AS((void)cosine_integral(std::numeric_limits<double>::quiet_NaN()),
                  rca::DomainError);
}
