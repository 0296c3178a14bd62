#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "plap/problem.hpp"
#include "support.hpp"

using namespace plap;

TEST_CASE("signed_power examples") {
  CHECK(signed_power(2.0, 1.0) == 2.0);
  CHECK(signed_power(-3.0, 0.5) == doctest::Approx(-1.7320508075688772).epsilon(1e-15));
  CHECK(signed_power(0.25, 2.0) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(signed_power(0.0625, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(signed_power(0.0, 0.5) == 0.0);
}

TEST_CASE("signed_power inverse pair holds on random draws") {
  testing::Draw draw(20240611);
  for (int i = 0; i < 10000; ++i) {
    const double s = draw.uniform(-50.0, 50.0);
    const double alpha = draw.uniform(0.2, 5.0);
    CAPTURE(s);
    CAPTURE(alpha);
    const double back = signed_power(signed_power(s, alpha), 1.0 / alpha);
    CHECK(std::abs(back - s) <= 1e-10 * std::max(1.0, std::abs(s)));
    CHECK(std::signbit(signed_power(s, alpha)) == std::signbit(s));
  }
}

TEST_CASE("ball_measure closed forms") {
  CHECK(ball_measure(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ball_measure(2) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(ball_measure(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-15));
  CHECK(ball_measure(3) == doctest::Approx(4.18879020).epsilon(1e-8));
  CHECK_THROWS_AS(ball_measure(0), std::invalid_argument);
}

TEST_CASE("ProblemParams invariants") {
  CHECK_THROWS_WITH_AS(ProblemParams(1, 1.5, 1.5), doctest::Contains("q > p"), std::invalid_argument);
  CHECK_THROWS_AS(ProblemParams(1, 1.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(ProblemParams(1, 2.5, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(ProblemParams(0, 1.5, 3.0), std::invalid_argument);
  CHECK_NOTHROW(ProblemParams(1, 2.0, 3.0));

  const ProblemParams pp(3, 1.5, 10.0);
  CHECK(pp.conjugate_exponent() == doctest::Approx(3.0));
  CHECK(pp.sphere_measure() == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(pp.critical_exponent() == doctest::Approx(3.0 * 1.5 / 1.5));
  CHECK(std::isinf(ProblemParams(1, 1.5, 10.0).critical_exponent()));
}

TEST_CASE("a priori bounds") {
  const ProblemParams a(1, 1.5, 10.0);
  CHECK(a.value_bound() == doctest::Approx(1.25006).epsilon(1e-5));
  CHECK(a.derivative_bound() == doctest::Approx(1.42441).epsilon(1e-5));
  CHECK(ProblemParams(1, 1.5, 100.0).value_bound() == doctest::Approx(1.04356).epsilon(1e-5));
}

TEST_CASE("truncated nonlinearity") {
  const ProblemParams pp(1, 1.5, 10.0);
  const TruncationParams tr{4.0, 2.5};
  CHECK(truncated_f(0.5, pp, tr) == doctest::Approx(std::pow(0.5, 9)).epsilon(1e-14));
  CHECK(truncated_f(0.5, pp, tr) == doctest::Approx(0.00195313).epsilon(1e-5));

  SUBCASE("continuity and matching slopes at s0") {
    const double s0 = tr.s0;
    CHECK(truncated_f(s0, pp, tr) == doctest::Approx(std::pow(s0, 9)).epsilon(1e-14));
    const double h = 1e-6;
    const double left = (truncated_f(s0, pp, tr) - truncated_f(s0 - h, pp, tr)) / h;
    const double right = (truncated_f(s0 + h, pp, tr) - truncated_f(s0, pp, tr)) / h;
    const double exact = 9.0 * std::pow(s0, 8);
    CHECK(left == doctest::Approx(exact).epsilon(1e-5));
    CHECK(right == doctest::Approx(exact).epsilon(1e-5));
  }

  SUBCASE("primitive differentiates back to f") {
    testing::Draw draw(7);
    for (int i = 0; i < 200; ++i) {
      const double s = draw.uniform(0.1, 8.0);
      const double h = 1e-6 * s;
      const double fd = (truncated_F(s + h, pp, tr) - truncated_F(s - h, pp, tr)) / (2 * h);
      CAPTURE(s);
      CHECK(fd == doctest::Approx(truncated_f(s, pp, tr)).epsilon(1e-6));
    }
    CHECK(truncated_F(0.5, pp, tr) == doctest::Approx(std::pow(0.5, 10) / 10).epsilon(1e-14));
  }

  CHECK_THROWS_AS(truncated_f(-1.0, pp, tr), std::domain_error);
  CHECK_THROWS_AS(truncated_F(-1.0, pp, tr), std::domain_error);
}

TEST_CASE("truncation defaults are admissible") {
  for (double p : {1.2, 1.5, 1.8, 2.0})
    for (int N : {1, 2, 3, 5}) {
      const ProblemParams pp(N, p, 40.0);
      const auto tr = TruncationParams::defaults(pp);
      CAPTURE(N);
      CAPTURE(p);
      CHECK_NOTHROW(tr.validate(pp));
      CHECK(tr.ell > p);
      CHECK(tr.s0 >= 4.0);
    }
  const ProblemParams pp(1, 1.5, 10.0);
  CHECK_THROWS_AS((TruncationParams{4.0, 1.2}).validate(pp), std::invalid_argument);
}

TEST_CASE("constant energy closed form") {
  CHECK(constant_energy(ProblemParams(2, 1.5, 20.0)) ==
        doctest::Approx(std::numbers::pi * (1.0 / 1.5 - 0.05)).epsilon(1e-14));
  CHECK(constant_energy(ProblemParams(2, 1.5, 20.0)) == doctest::Approx(1.937315).epsilon(1e-6));
  CHECK(constant_energy(ProblemParams(1, 1.5, 1e12)) == doctest::Approx(2.0 / 1.5).epsilon(1e-10));
}

TEST_CASE("cone validator") {
  auto c = RadialProfile::constant(16, 1.0);
  CHECK_FALSE(cone_violation(c, 1e-10).has_value());

  auto dec = c;
  dec.u[5] = 0.9;
  REQUIRE(cone_violation(dec, 1e-10).has_value());
  CHECK(cone_violation(dec, 1e-10)->rfind("cone", 0) == 0);

  auto neg = RadialProfile::constant(16, -0.5);
  CHECK(cone_violation(neg, 1e-10).has_value());

  auto slope = c;
  slope.du[3] = -1e-6;
  CHECK(cone_violation(slope, 1e-10).has_value());
  CHECK_FALSE(cone_violation(slope, 1e-5).has_value());

  auto origin = c;
  origin.du[0] = 0.1;
  REQUIRE(cone_violation(origin, 1e-10).has_value());
  CHECK(cone_violation(origin, 1e-10)->rfind("regularity", 0) == 0);

  auto ragged = c;
  ragged.du.pop_back();
  CHECK(cone_violation(ragged, 1e-10).has_value());

  auto nan = c;
  nan.u[2] = std::nan("");
  CHECK(cone_violation(nan, 1e-10).has_value());
}
