#include <doctest.h>

#include <cmath>

#include "plap/functionals.hpp"
#include "plap/ivp.hpp"
#include "support.hpp"

using namespace plap;

TEST_CASE("series start matches the expansion formulas") {
  const ProblemParams pp(1, 1.5, 10.0);
  IntegratorControls c;
  c.eps0 = 1e-3;

  // Independent evaluation: c0 = d^{p-1} - d^{q-1}, w = c0 eps^N / N,
  // u = d + (p-1)/p (c0/N)^{1/(p-1)} eps^{p/(p-1)}.
  const double c0 = std::pow(0.5, 0.5) - std::pow(0.5, 9.0);
  CHECK(c0 == doctest::Approx(0.705154).epsilon(1e-6));

  const auto s = series_start(0.5, pp, c);
  CHECK(s.r == 1e-3);
  CHECK(s.w == doctest::Approx(c0 * 1e-3).epsilon(1e-12));
  CHECK(s.w == doctest::Approx(7.05154e-4).epsilon(1e-5));
  CHECK(s.u - 0.5 == doctest::Approx((1.0 / 3.0) * c0 * c0 * 1e-9).epsilon(1e-6));
  CHECK(s.u - 0.5 == doctest::Approx(1.6575e-10).epsilon(1e-4));

  const auto s2 = series_start(0.5, ProblemParams(2, 1.5, 10.0), c);
  CHECK(s2.w == doctest::Approx(c0 * 1e-6 / 2).epsilon(1e-12));
  CHECK(s2.w == doctest::Approx(3.52577e-7).epsilon(1e-5));

  const auto one = series_start(1.0, pp, c);
  CHECK(one.u == 1.0);
  CHECK(one.w == 0.0);
}

TEST_CASE("constant solution is a fixed point") {
  const ProblemParams pp(2, 1.5, 40.0);
  const auto res = integrate(1.0, pp, IntegratorControls{});
  REQUIRE(res.status == IvpStatus::ReachedOne);
  for (std::size_t i = 0; i < res.profile.size(); ++i) {
    CHECK(res.profile.u[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(res.profile.du[i]) <= 1e-12);
  }
  CHECK(std::abs(res.terminal.w) <= 1e-12);
}

TEST_CASE("limit system at p = 2 reproduces cosh") {
  const ProblemParams pp(1, 2.0, 3.0);
  IntegratorControls c;
  c.rel_tol = 1e-12;
  c.abs_tol = 1e-14;
  const auto res = integrate(1.0, pp, c, SourceTerm::LimitOnly);
  REQUIRE(res.status == IvpStatus::ReachedOne);
  double err = 0.0;
  for (std::size_t i = 0; i < res.profile.size(); ++i) {
    err = std::max(err, std::abs(res.profile.u[i] - std::cosh(res.profile.r[i])));
    err = std::max(err, std::abs(res.profile.du[i] - std::sinh(res.profile.r[i])));
  }
  CHECK(err <= 1e-9);
  CHECK(res.profile.r.back() == 1.0);
}

TEST_CASE("halving eps0 barely moves the solution") {
  const ProblemParams pp(1, 1.5, 40.0);
  IntegratorControls a;
  a.rel_tol = 1e-12;
  a.abs_tol = 1e-14;
  a.eps0 = 1e-6;
  IntegratorControls b = a;
  b.eps0 = 5e-7;
  const auto ra = integrate(0.85, pp, a);
  const auto rb = integrate(0.85, pp, b);
  const std::size_t i = ra.profile.size() / 10;  // r = 0.1 on the 2048 grid
  REQUIRE(ra.profile.r[i] == doctest::Approx(0.1).epsilon(1e-2));
  CHECK(std::abs(ra.profile.u[i] - rb.profile.u[i]) <= 1e-10);
}

TEST_CASE("trajectories started in the cone keep a non-increasing Lyapunov function") {
  testing::Draw draw(99);
  for (int k = 0; k < 12; ++k) {
    const int N = draw.integer(1, 3);
    const double p = draw.uniform(1.2, 1.9);
    const double q = draw.uniform(8.0, 80.0);
    const ProblemParams pp(N, p, q);
    const double d = draw.uniform(0.3, 0.99);
    CAPTURE(N);
    CAPTURE(p);
    CAPTURE(q);
    CAPTURE(d);
    IntegratorControls c;
    c.rel_tol = 1e-11;
    c.abs_tol = 1e-13;
    const auto res = integrate(d, pp, c);
    if (res.status != IvpStatus::ReachedOne) continue;
    // Stop at the first node where u' turns negative; the identity is for the cone.
    auto prof = res.profile;
    std::size_t end = prof.size();
    for (std::size_t i = 1; i < prof.size(); ++i)
      if (prof.du[i] < 0.0) {
        end = i;
        break;
      }
    prof.r.resize(end);
    prof.u.resize(end);
    prof.du.resize(end);
    const auto L = lyapunov_series(prof, pp);
    CHECK(max_increase(L) <= 1e-8);
  }
}

TEST_CASE("starting above the value bound drives the flux down") {
  // u > 1 makes w' = u^{p-1} - u^{q-1} negative, so u decreases until it falls below 1.
  const ProblemParams pp(1, 1.5, 10.0);
  const double d = pp.value_bound() + 0.5;
  const auto res = integrate(d, pp, IntegratorControls{});
  REQUIRE(res.profile.size() > 2);
  std::size_t i = 1;
  for (; i < res.profile.size() && res.profile.u[i] > 1.0; ++i) {
    CHECK(res.profile.du[i] < 0.0);
    CHECK(res.profile.u[i] < res.profile.u[i - 1]);
  }
  CHECK(i > 10);
  CHECK(i < res.profile.size());
}

TEST_CASE("blow-up is reported with a radius") {
  // The limit trajectory from 0.9 ends near 0.9 / 0.742 = 1.21 at r = 1.
  const ProblemParams pp(1, 1.5, 2.0);
  IntegratorControls c;
  c.u_cap = 1.05;
  const auto up = integrate(0.9, pp, c, SourceTerm::LimitOnly);
  CHECK(up.status == IvpStatus::BlewUp);
  CHECK(up.blowup_radius > 0.0);
  CHECK(up.blowup_radius < 1.0);
  CHECK(up.terminal.u == doctest::Approx(1.05).epsilon(1e-8));
  c.u_cap = 2.0;
  CHECK(integrate(0.9, pp, c, SourceTerm::LimitOnly).status == IvpStatus::ReachedOne);
}

TEST_CASE("step budget exhaustion is reported") {
  const ProblemParams pp(1, 1.5, 40.0);
  IntegratorControls c;
  c.max_steps = 3;
  CHECK(integrate(0.8, pp, c).status == IvpStatus::StepBudgetExhausted);
}

TEST_CASE("integration is deterministic") {
  const ProblemParams pp(2, 1.5, 160.0);
  const auto a = integrate(0.9, pp, IntegratorControls{});
  const auto b = integrate(0.9, pp, IntegratorControls{});
  CHECK(a.profile.u == b.profile.u);
  CHECK(a.profile.du == b.profile.du);
  CHECK(a.accepted_steps == b.accepted_steps);
}

TEST_CASE("invalid initial values are rejected") {
  CHECK_THROWS_AS(integrate(0.0, ProblemParams(1, 1.5, 10.0), IntegratorControls{}), std::invalid_argument);
}

TEST_CASE("observed order of the stepper") {
  for (double p : {1.5, 2.0}) {
    const ProblemParams pp(1, p, 20.0);
    const auto probe = convergence_order_probe(pp, IntegratorControls{}, 0.6, 0.1);
    CAPTURE(p);
    CHECK_FALSE(probe.degenerate);
    CHECK(probe.order >= 4.0);
  }
  const auto flat = convergence_order_probe(ProblemParams(1, 1.5, 20.0), IntegratorControls{}, 1.0, 0.1);
  CHECK(flat.degenerate);
}
