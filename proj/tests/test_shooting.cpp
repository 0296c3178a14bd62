#include <doctest.h>

#include <cmath>
#include <numbers>

#include "plap/shooting.hpp"

using namespace plap;

TEST_CASE("miss function signs") {
  const ProblemParams pp(1, 1.5, 40.0);
  const IntegratorControls c{.eps0 = 1e-6, .rel_tol = 1e-10, .abs_tol = 1e-12};
  CHECK(miss(1.0, pp, c) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(miss(1e-3, ProblemParams(1, 1.5, 160.0), c) > 0.0);
  CHECK(std::abs(miss(1.0 - 1e-12, pp, c)) <= 1e-10);
}

TEST_CASE("scan abscissae") {
  const ScanSpec spec;
  const auto pts = spec.points();
  REQUIRE(pts.size() > spec.log_points);
  CHECK(pts.front() == doctest::Approx(spec.d_min));
  CHECK(pts.back() <= 1.0 - spec.min_gap);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i] > pts[i - 1]);
}

TEST_CASE("q barely above p has no non-constant solutions") {
  const auto set = find_solutions(ProblemParams(1, 1.5, 1.6));
  CHECK(set.roots.empty());
  CHECK(set.accepted().empty());
  CHECK(set.low_energy() == nullptr);
  CHECK(set.high_energy() == nullptr);
}

TEST_CASE("two accepted roots at p = 1.5, N = 1, q = 40") {
  const ProblemParams pp(1, 1.5, 40.0);
  const auto set = find_solutions(pp);
  REQUIRE(set.accepted().size() == 2);
  const auto* u = set.low_energy();
  const auto* v = set.high_energy();
  REQUIRE(u != nullptr);
  REQUIRE(v != nullptr);
  CHECK(u->d < v->d);
  CHECK(v->d < 1.0);
  CHECK(u->energy.energy < set.constant_energy);
  CHECK(set.constant_energy < v->energy.energy);
  CHECK(u->label == RootLabel::LowEnergy);
  CHECK(v->label == RootLabel::HighEnergy);
  CHECK(set.constant_energy == doctest::Approx(constant_energy(pp)).epsilon(1e-15));
  for (const auto* r : {u, v}) {
    CHECK(r->profile().u.front() < 1.0);
    CHECK(r->profile().u.back() > 1.0);
    CHECK(std::abs(r->profile().du.back()) <= 1e-8);
    CHECK(std::abs(r->energy_gap) > r->margin_tol);
  }
  const auto tr = TruncationParams::defaults(pp);
  CHECK(classify(u->profile(), pp, tr) == RootLabel::LowEnergy);
  CHECK(classify(v->profile(), pp, tr) == RootLabel::HighEnergy);
  CHECK(classify(RadialProfile::constant(2048, 1.0), pp, tr) == RootLabel::Ambiguous);
}

TEST_CASE("p = 2 bifurcation from the constant at q = 2 + pi^2") {
  // Linearizing u'' = u - u^{q-1} at u = 1 gives v'' = -(q-2) v; the first
  // even Neumann mode on (-1, 1) appears when q - 2 = pi^2.
  const double qc = 2.0 + std::numbers::pi * std::numbers::pi;
  CHECK(find_solutions(ProblemParams(1, 2.0, qc - 0.5)).accepted().empty());
  CHECK_FALSE(find_solutions(ProblemParams(1, 2.0, qc + 2.0)).accepted().empty());
}

TEST_CASE("refinement is stable under a tighter bisection tolerance") {
  const ProblemParams pp(1, 1.5, 80.0);
  ShootingOptions a;
  ShootingOptions b;
  b.scan.d_tol = a.scan.d_tol / 2;
  const auto sa = find_solutions(pp, a);
  const auto sb = find_solutions(pp, b);
  REQUIRE(sa.accepted().size() == sb.accepted().size());
  for (std::size_t i = 0; i < sa.accepted().size(); ++i)
    CHECK(std::abs(sa.accepted()[i]->d - sb.accepted()[i]->d) <= 1e-12);
}

TEST_CASE("overlapping brackets collapse to one root") {
  ShootingOptions opt;
  opt.scan.log_points = 2048;  // dense scan, many near-identical brackets are impossible but dedup must hold
  const auto set = find_solutions(ProblemParams(1, 1.5, 40.0), opt);
  for (std::size_t i = 1; i < set.roots.size(); ++i)
    CHECK(set.roots[i].d - set.roots[i - 1].d >= 10 * opt.scan.d_tol);
  CHECK(set.accepted().size() == 2);
}

TEST_CASE("non-monotone roots are rejected with a reason") {
  const auto set = find_solutions(ProblemParams(1, 1.5, 320.0));
  std::size_t rejected = 0;
  for (const auto& r : set.roots)
    if (!r.accepted()) {
      ++rejected;
      REQUIRE(r.rejection.has_value());
      CHECK(r.label == RootLabel::Rejected);
      CHECK_FALSE(r.rejection->empty());
    }
  CHECK(rejected >= 1);
  CHECK(set.count(RootLabel::HighEnergy) == 1);
  CHECK(set.high_energy()->d == doctest::Approx(0.999668).epsilon(1e-6));
}

TEST_CASE("parallel scan matches the serial scan") {
  const ProblemParams pp(2, 1.5, 160.0);
  ShootingOptions serial;
  serial.workers = 1;
  ShootingOptions par;
  par.workers = 4;
  const auto a = find_solutions(pp, serial);
  const auto b = find_solutions(pp, par);
  CHECK(a.scan_miss == b.scan_miss);
  REQUIRE(a.roots.size() == b.roots.size());
  for (std::size_t i = 0; i < a.roots.size(); ++i) CHECK(a.roots[i].d == b.roots[i].d);
}
