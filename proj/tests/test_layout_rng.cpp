#include <doctest.h>

#include "rca/errors.hpp"
#include "rca/layout.hpp"
#include "rca/optimize.hpp"
#include "rca/rng.hpp"

using namespace rca;

namespace {
const double kLambda = 0.04;
}

TEST_CASE("counter rng: determinism and substream independence") {
  Prng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Prng s0 = Prng(42).fold_in(0);
  Prng s1 = Prng(42).fold_in(1);
  CHECK(s0.next_u64() != s1.next_u64());

  // folding is independent of draws already taken from the parent
  Prng parent(7);
  const Prng before = parent.fold_in(3);
  (void)parent.next_u64();
  Prng after = parent.fold_in(3);
  Prng expect = before;
  CHECK(after.next_u64() == expect.next_u64());
}

TEST_CASE("uniform and normal draws are in range and reproducible") {
  Prng rng(3);
  double mean = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  CHECK(std::abs(mean / 1000.0 - 0.5) < 0.05);

  Prng g(5);
  double m2 = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const auto [x, y] = g.normal_pair();
    m2 += x * x + y * y;
  }
  CHECK(std::abs(m2 / 4000.0 - 1.0) < 0.05);
}

TEST_CASE("fixed coupler layout is the 0.4λ-uniform baseline geometry") {
  const ArrayLayout layout = fixed_coupler_layout(3, 2, 1.2 * kLambda, 0.4 * kLambda,
                                                  1.0 * kLambda, 0.1 * kLambda);
  CHECK(layout.active_count() == 3);
  CHECK(layout.coupler_count() == 6);
  REQUIRE(is_feasible(layout));

  // ports collapse onto one line with uniform 0.4λ spacing
  std::vector<double> xs;
  for (const Vec3& p : layout.active_positions) xs.push_back(p.x());
  for (const Vec3& p : layout.coupler_positions) xs.push_back(p.x());
  std::sort(xs.begin(), xs.end());
  for (size_t i = 1; i < xs.size(); ++i) {
    CHECK(std::abs((xs[i] - xs[i - 1]) - 0.4 * kLambda) < 1e-12);
  }
}

TEST_CASE("feasibility predicate names the violation") {
  ArrayLayout layout = fixed_coupler_layout(1, 2, kLambda, 0.4 * kLambda, kLambda,
                                            0.1 * kLambda);
  CHECK(!feasibility_violation(layout));

  ArrayLayout off_plane = layout;
  off_plane.coupler_positions[0].z() = 0.001;
  CHECK(feasibility_violation(off_plane).value().find("plane") != std::string::npos);

  ArrayLayout outside = layout;
  outside.coupler_positions[0].x() = 2.0 * kLambda;
  CHECK(feasibility_violation(outside).value().find("region") != std::string::npos);

  ArrayLayout close = layout;
  close.coupler_positions[0] = close.coupler_positions[1] + Vec3(0.01 * kLambda, 0, 0);
  CHECK(feasibility_violation(close).value().find("closer") != std::string::npos);
}

TEST_CASE("random feasible layouts satisfy every invariant") {
  const ArrayLayout base = fixed_coupler_layout(3, 2, 1.2 * kLambda, 0.4 * kLambda,
                                                1.0 * kLambda, 0.1 * kLambda);
  const Prng rng(17);
  for (int i = 0; i < 50; ++i) {
    const ArrayLayout draw = random_feasible_layout(base, rng.fold_in(i));
    CHECK(is_feasible(draw));
  }
}

TEST_CASE("structural validation raises ConfigError") {
  ArrayLayout bad;
  CHECK_THROWS_AS(validate_structure(bad), ConfigError);
  bad.active_positions = {Vec3(0, 0, 0)};
  bad.coupler_positions = {Vec3(0.01, 0, 0)};
  bad.coupler_owner = {2};  // out of range
  bad.region_half_width = kLambda;
  CHECK_THROWS_AS(validate_structure(bad), ConfigError);
}
