#include <doctest.h>

#include <cmath>
#include <numbers>

#include "plap/asymptotics.hpp"
#include "plap/functionals.hpp"
#include "plap/shooting.hpp"
#include "support.hpp"

using namespace plap;

namespace {

std::vector<double> fill(const std::vector<double>& r, double (*f)(double)) {
  std::vector<double> out;
  for (double x : r) out.push_back(f(x));
  return out;
}

const RootInfo& find_root(const SolutionSet& set, RootLabel label) {
  for (const auto* r : set.accepted())
    if (r->label == label) return *r;
  throw std::runtime_error("missing root");
}

const SolutionSet& q40_set() {
  static const SolutionSet set = find_solutions(ProblemParams(1, 1.5, 40.0));
  return set;
}

}  // namespace

TEST_CASE("radial integral of monomials") {
  for (std::size_t M : {64u, 65u, 2048u}) {
    const auto r = RadialProfile::uniform_grid(M);
    CAPTURE(M);
    CHECK(radial_integral(fill(r, [](double) { return 1.0; }), r, ProblemParams(1, 1.5, 10.0)) ==
          doctest::Approx(2.0).epsilon(1e-14));
    CHECK(radial_integral(fill(r, [](double) { return 1.0; }), r, ProblemParams(2, 1.5, 10.0)) ==
          doctest::Approx(std::numbers::pi).epsilon(1e-14));
    CHECK(radial_integral(fill(r, [](double x) { return x; }), r, ProblemParams(1, 1.5, 10.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // ω ∫ r r^2 dr = π for N = 3; cubic integrands are exact.
    CHECK(radial_integral(fill(r, [](double x) { return x; }), r, ProblemParams(3, 1.5, 10.0)) ==
          doctest::Approx(std::numbers::pi).epsilon(1e-13));
  }
  const auto r = RadialProfile::uniform_grid(512);
  const auto e = radial_integral_error(fill(r, [](double x) { return std::exp(x); }), r, ProblemParams(1, 1.5, 10.0));
  CHECK(e < 1e-12);
  auto bent = r;
  bent[3] += 1e-4;
  CHECK_THROWS_AS(radial_integral(fill(r, [](double) { return 1.0; }), bent, ProblemParams(1, 1.5, 10.0)),
                  std::invalid_argument);
}

TEST_CASE("energy of constants") {
  const ProblemParams pp(1, 1.5, 20.0);
  const auto tr = TruncationParams::defaults(pp);
  CHECK(energy(RadialProfile::constant(2048, 1.0), pp, tr).energy ==
        doctest::Approx(constant_energy(pp)).epsilon(1e-12));

  const ProblemParams pp10(1, 1.5, 10.0);
  const TruncationParams tr4{4.0, 2.5};
  const double expect = 2.0 * (std::pow(2.0, 1.5) / 1.5 - std::pow(2.0, 10.0) / 10.0);
  const auto e = energy(RadialProfile::constant(2048, 2.0), pp10, tr4);
  CHECK(e.energy == doctest::Approx(expect).epsilon(1e-12));
  CHECK(e.energy == doctest::Approx(-201.0288).epsilon(1e-6));
  CHECK_FALSE(e.truncated);
}

TEST_CASE("Nehari projection of constants") {
  const ProblemParams pp(1, 1.5, 20.0);
  const auto tr = TruncationParams::defaults(pp);
  for (double c : {0.5, 1.0, 2.0, 3.0}) {
    CAPTURE(c);
    CHECK(nehari_project(RadialProfile::constant(256, c), pp, tr) == doctest::Approx(1.0 / c).epsilon(1e-12));
  }
  CHECK_THROWS_AS(nehari_project(RadialProfile::constant(256, 0.0), pp, tr), std::invalid_argument);
  const auto u = find_root(q40_set(), RootLabel::LowEnergy).profile();
  const ProblemParams p40(1, 1.5, 40.0);
  CHECK(nehari_project(u, p40, TruncationParams::defaults(p40)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("a priori report on the constant solution") {
  const ProblemParams pp(1, 1.5, 10.0);
  const auto rep = apriori_check(RadialProfile::constant(64, 1.0), pp, TruncationParams::defaults(pp));
  CHECK(rep.passed());
  CHECK(rep.value_margin == doctest::Approx(pp.value_bound() - 1.0));
  CHECK(rep.derivative_margin == doctest::Approx(pp.derivative_bound()));
}

TEST_CASE("Lyapunov series of constants") {
  const ProblemParams pp(2, 1.5, 10.0);
  const auto L = lyapunov_series(RadialProfile::constant(64, 1.0), pp);
  for (double x : L) CHECK(x == doctest::Approx(1.0 / 10.0 - 1.0 / 1.5));
  CHECK(max_increase(L) == 0.0);
}

TEST_CASE("Hoelder seminorm") {
  CHECK(holder_seminorm(RadialProfile::constant(100, 3.0), 0.5) == 0.0);
  const auto ramp = testing::sampled(100, [](double r) { return r; }, [](double) { return 1.0; });
  CHECK(holder_seminorm(ramp, 0.5) == doctest::Approx(1.0).epsilon(1e-14));

  testing::Draw draw(3);
  const auto wiggle = testing::sampled(
      4096, [](double r) { return std::sin(9.0 * r) + r * r; }, [](double r) { return 9.0 * std::cos(9.0 * r) + 2 * r; });
  double prev = 0.0;
  for (std::size_t stride : {64u, 16u, 4u, 1u}) {
    const double v = holder_seminorm_strided(wiggle, 0.5, stride);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("weak inequality and weak residual on the constant solution") {
  const ProblemParams pp(1, 1.5, 40.0);
  const auto one = RadialProfile::constant(2048, 1.0);
  const auto battery = default_battery(one, pp, nullptr);
  for (const auto& phi : battery) {
    CAPTURE(phi.name);
    CHECK(std::abs(weak_residual(one, pp, phi)) <= 1e-14);
  }
  const auto rep = weak_inequality_check(one, pp, battery);
  CHECK(rep.worst_slack >= -1e-12);
}

TEST_CASE("weak-form identities on a computed solution") {
  const ProblemParams pp(1, 1.5, 40.0);
  const auto& u = find_root(q40_set(), RootLabel::LowEnergy).profile();
  const auto& grid = u.r;

  // φ ≡ 1 gives ∫(u^{p-1} - u^{q-1}) = 0.
  CHECK(std::abs(weak_residual(u, pp, TestFunction::constant(grid, 1.0))) <= 1e-6);
  CHECK(std::abs(weak_residual(u, pp, TestFunction::ramp(grid, 0.0, 1.0))) <= 1e-6);

  const auto self = TestFunction::solution(u);
  const auto rep_self = weak_inequality_check(u, pp, std::span<const TestFunction>(&self, 1));
  CHECK(std::abs(rep_self.worst_slack) <= 1e-12);

  const auto bound = TestFunction::constant(grid, pp.value_bound());
  const auto zero = TestFunction::constant(grid, 0.0);
  const std::vector<TestFunction> pair{bound, zero};
  const auto rep = weak_inequality_check(u, pp, pair);
  for (const auto& [name, slack] : rep.slacks) {
    CAPTURE(name);
    CHECK(slack >= -1e-7);
  }
}

TEST_CASE("local minimality probe around the constant solution") {
  const ProblemParams pp(1, 1.5, 100.0);
  const auto tr = TruncationParams::defaults(pp);
  const auto grid = RadialProfile::uniform_grid(2048);

  const double eps0[] = {0.0};
  const NamedDirection flat{"1 - r", one_minus_r(grid)};
  const auto zero_rows = local_min_probe(pp, tr, std::span<const NamedDirection>(&flat, 1), eps0);
  REQUIRE(zero_rows.size() == 1);
  CHECK(zero_rows[0].energy_gap == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));

  auto up = one_minus_r(grid);
  for (double& x : up.u) x = -x;
  for (double& x : up.du) x = -x;
  auto g = compute_G(pp).profile;
  for (double& x : g.u) x -= 1.0;
  std::vector<NamedDirection> dirs{{"r - 1", up}, {"G - 1", g}, flat};
  const double eps[] = {0.01, 0.05, 0.1};
  for (const auto& row : local_min_probe(pp, tr, dirs, eps)) {
    CAPTURE(row.direction);
    CAPTURE(row.eps);
    if (row.direction == "r - 1") {
      CHECK(row.in_cone);
      // The minimality neighborhood shrinks with q; only the smallest step is inside it here.
      if (row.eps == 0.01) CHECK(row.energy_gap >= 0.0);
    } else if (row.direction == "G - 1") {
      CHECK(row.in_cone);
      CHECK_FALSE(row.error.has_value());
      CHECK(row.energy_gap >= 0.0);
    } else {
      CHECK_FALSE(row.in_cone);
    }
  }
}

TEST_CASE("certificate on the computed q = 40 solutions") {
  const ProblemParams pp(1, 1.5, 40.0);
  const auto tr = TruncationParams::defaults(pp);
  for (const auto* root : q40_set().accepted()) {
    const auto cert = certify_solution(root->profile(), pp, tr, nullptr);
    for (const auto& c : cert.checks) {
      CAPTURE(c.name);
      CAPTURE(c.detail);
      CHECK(c.passed);
    }
    CHECK(crossings_of_one(root->profile()) == 1);
  }
  const auto cert_one = certify_solution(RadialProfile::constant(2048, 1.0), pp, tr, nullptr);
  CHECK(cert_one.passed());

  auto broken = q40_set().low_energy()->profile();
  broken.u[1000] -= 0.05;
  const auto cert_bad = certify_solution(broken, pp, tr, nullptr);
  CHECK_FALSE(cert_bad.passed());
  REQUIRE(cert_bad.find("cone") != nullptr);
  CHECK_FALSE(cert_bad.find("cone")->passed);
}
