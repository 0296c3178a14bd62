#include "plap/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace plap {

namespace {

void check_grid(std::span<const double> f, std::span<const double> r) {
  if (f.size() != r.size()) throw std::invalid_argument("radial_integral: integrand/grid length mismatch");
  if (r.size() < 2) throw std::invalid_argument("radial_integral: need at least two nodes");
  const double h = (r.back() - r.front()) / static_cast<double>(r.size() - 1);
  if (!(h > 0.0)) throw std::invalid_argument("radial_integral: grid must be increasing");
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double expected = r.front() + h * static_cast<double>(i);
    if (std::abs(r[i] - expected) > 1e-9 * h) throw std::invalid_argument("radial_integral: grid is not uniform");
  }
}

// Composite Simpson on uniformly spaced samples g_0..g_M with spacing h.
double simpson(std::span<const double> g, double h) {
  const std::size_t M = g.size() - 1;
  if (M == 1) return 0.5 * h * (g[0] + g[1]);
  std::size_t even_end = M;
  double tail = 0.0;
  if (M % 2 == 1) {
    even_end = M - 3;
    tail = 3.0 * h / 8.0 * (g[M - 3] + 3.0 * g[M - 2] + 3.0 * g[M - 1] + g[M]);
  }
  double s = 0.0;
  if (even_end > 0) {
    s = g[0] + g[even_end];
    for (std::size_t i = 1; i < even_end; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * g[i];
    s *= h / 3.0;
  }
  return s + tail;
}

std::vector<double> weighted(std::span<const double> f, std::span<const double> r, int N) {
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = N == 1 ? f[i] : f[i] * std::pow(r[i], N - 1);
  return g;
}

double p_power_density(double v, double p) { return std::pow(std::abs(v), p); }

// ∫ (|φ'|^p + |φ|^p) / p
double norm_term(const RadialProfile& phi, const ProblemParams& params) {
  const double p = params.p();
  std::vector<double> f(phi.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = (p_power_density(phi.du[i], p) + p_power_density(phi.u[i], p)) / p;
  return radial_integral(f, phi.r, params);
}

void require_same_grid(const RadialProfile& a, const RadialProfile& b) {
  if (a.size() != b.size()) throw std::invalid_argument("profiles live on different grids");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.r[i] != b.r[i]) throw std::invalid_argument("profiles live on different grids");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double radial_integral(std::span<const double> f, std::span<const double> r, const ProblemParams& params) {
  check_grid(f, r);
  const double h = (r.back() - r.front()) / static_cast<double>(r.size() - 1);
  const auto g = weighted(f, r, params.N());
  return params.sphere_measure() * simpson(g, h);
}

double radial_integral_error(std::span<const double> f, std::span<const double> r,
                             const ProblemParams& params) {
  check_grid(f, r);
  const std::size_t M = r.size() - 1;
  if (M < 4 || M % 2 != 0) return 0.0;
  const double h = (r.back() - r.front()) / static_cast<double>(M);
  const auto g = weighted(f, r, params.N());
  std::vector<double> coarse;
  coarse.reserve(M / 2 + 1);
  for (std::size_t i = 0; i <= M; i += 2) coarse.push_back(g[i]);
  const double fine = simpson(g, h);
  const double rough = simpson(coarse, 2.0 * h);
  double scale = 0.0;
  for (double v : g) scale += std::abs(v);
  const double rounding = 8.0 * std::numeric_limits<double>::epsilon() * scale * h;
  return params.sphere_measure() * (std::abs(fine - rough) / 15.0 + rounding);
}

EnergyReport energy(const RadialProfile& profile, const ProblemParams& params, const TruncationParams& trunc,
                    double holder_exponent) {
  const double p = params.p();
  const double q = params.q();
  const std::size_t n = profile.size();
  EnergyReport rep;
  rep.holder_exponent = holder_exponent;
  rep.sup = 0.0;
  for (double v : profile.u) rep.sup = std::max(rep.sup, std::abs(v));
  rep.truncated = rep.sup > trunc.s0;

  std::vector<double> norm(n), prim(n), dens(n), nehari_rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = std::abs(profile.u[i]);
    norm[i] = p_power_density(profile.du[i], p) + std::pow(u, p);
    prim[i] = rep.truncated ? truncated_F(u, params, trunc) : std::pow(u, q) / q;
    nehari_rhs[i] = rep.truncated ? truncated_f(u, params, trunc) * u : std::pow(u, q);
    dens[i] = norm[i] / p - prim[i];
  }
  rep.w1p_p = radial_integral(norm, profile.r, params);
  rep.q_term = radial_integral(prim, profile.r, params);
  rep.energy = radial_integral(dens, profile.r, params);
  rep.nehari_residual = rep.w1p_p - radial_integral(nehari_rhs, profile.r, params);
  rep.quadrature_error = radial_integral_error(dens, profile.r, params);
  rep.holder = holder_seminorm(profile, holder_exponent);
  return rep;
}

double w1p_distance(const RadialProfile& a, const RadialProfile& b, const ProblemParams& params) {
  require_same_grid(a, b);
  const double p = params.p();
  std::vector<double> f(a.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = p_power_density(a.du[i] - b.du[i], p) + p_power_density(a.u[i] - b.u[i], p);
  return std::pow(radial_integral(f, a.r, params), 1.0 / p);
}

double w1p_distance_to_constant(const RadialProfile& a, double c, const ProblemParams& params) {
  const double p = params.p();
  std::vector<double> f(a.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = p_power_density(a.du[i], p) + p_power_density(a.u[i] - c, p);
  return std::pow(radial_integral(f, a.r, params), 1.0 / p);
}

double sup_distance(const RadialProfile& a, const RadialProfile& b) {
  require_same_grid(a, b);
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.u[i] - b.u[i]));
  return d;
}

double nehari_project(const RadialProfile& profile, const ProblemParams& params, const TruncationParams& trunc) {
  const double p = params.p();
  const double q = params.q();
  std::vector<double> norm(profile.size()), qpow(profile.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double u = std::abs(profile.u[i]);
    sup = std::max(sup, u);
    norm[i] = p_power_density(profile.du[i], p) + std::pow(u, p);
    qpow[i] = std::pow(u, q);
  }
  if (sup == 0.0) throw std::invalid_argument("nehari_project: profile is identically zero");
  // Work with u / sup to keep u^q representable; t = (A/B)^{1/(q-p)} / sup.
  std::vector<double> norm_s(profile.size()), qpow_s(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    norm_s[i] = norm[i] / std::pow(sup, p);
    qpow_s[i] = std::pow(std::abs(profile.u[i]) / sup, q);
  }
  const double A = radial_integral(norm_s, profile.r, params);
  const double B = radial_integral(qpow_s, profile.r, params);
  const double t = std::pow(A / B, 1.0 / (q - p)) / sup;
  if (t * sup > trunc.s0) {
    std::ostringstream os;
    os << "nehari_project: projected sup " << t * sup << " exceeds s0 = " << trunc.s0
       << " (truncation regime, closed form invalid)";
    throw TruncationRegimeError(os.str());
  }
  return t;
}

RadialProfile scaled(const RadialProfile& profile, double t) {
  RadialProfile out = profile;
  for (auto& v : out.u) v *= t;
  for (auto& v : out.du) v *= t;
  return out;
}

AprioriReport apriori_check(const RadialProfile& profile, const ProblemParams& params,
                            const TruncationParams& trunc, double tol) {
  const double p = params.p();
  const double q = params.q();
  const double vb = params.value_bound();
  const double db = params.derivative_bound();
  AprioriReport rep;
  rep.value_margin = std::numeric_limits<double>::infinity();
  rep.derivative_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < profile.size(); ++i) {
    rep.value_margin = std::min(rep.value_margin, vb - profile.u[i]);
    rep.derivative_margin = std::min(rep.derivative_margin, db - profile.du[i]);
  }
  const auto e = energy(profile, params, trunc);
  const double vol = params.ball_volume();
  const double pow_bound = std::pow(q / p, p / (q - p));
  rep.w1p_margin = vol * ((q - p) / (q * (p - 1.0)) + pow_bound) - e.w1p_p;
  rep.energy_vs_norm = e.w1p_p / p - e.energy;
  rep.norm_vs_bound = vol / p * pow_bound - e.w1p_p / p;

  const double rel = tol * std::max(1.0, e.w1p_p);
  if (rep.value_margin < -tol) rep.failures.push_back("value bound (q/p)^{1/(q-p)} exceeded by " + fmt(-rep.value_margin));
  if (rep.derivative_margin < -tol)
    rep.failures.push_back("derivative bound ((q-p)/(q(p-1)))^{1/p} exceeded by " + fmt(-rep.derivative_margin));
  if (rep.w1p_margin < -rel) rep.failures.push_back("W^{1,p} bound exceeded by " + fmt(-rep.w1p_margin));
  if (rep.energy_vs_norm < -rel) rep.failures.push_back("energy exceeds ||u||^p/p by " + fmt(-rep.energy_vs_norm));
  if (rep.norm_vs_bound < -rel)
    rep.failures.push_back("||u||^p/p exceeds (|B|/p)(q/p)^{p/(q-p)} by " + fmt(-rep.norm_vs_bound));
  return rep;
}

std::vector<double> lyapunov_series(const RadialProfile& profile, const ProblemParams& params) {
  const double p = params.p();
  const double q = params.q();
  std::vector<double> L(profile.size());
  for (std::size_t i = 0; i < L.size(); ++i) {
    const double u = profile.u[i];
    L[i] = (p - 1.0) / p * p_power_density(profile.du[i], p) - std::pow(std::abs(u), p) / p +
           std::pow(std::abs(u), q) / q;
  }
  return L;
}

double max_increase(std::span<const double> series) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < series.size(); ++i) m = std::max(m, series[i] - series[i - 1]);
  return series.size() < 2 ? 0.0 : m;
}

double phase_plane_margin(const RadialProfile& profile, const ProblemParams& params) {
  const double p = params.p();
  const double q = params.q();
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double x = profile.u[i];
    const double y = profile.du[i];
    if (x < 0.0) {
      margin = std::min(margin, x);
      continue;
    }
    const double inner = p / (p - 1.0) * (std::pow(x, p) / p - std::pow(x, q) / q);
    const double upper = inner > 0.0 ? std::pow(inner, 1.0 / p) : 0.0;
    margin = std::min({margin, y, upper - y});
    if (inner < 0.0) margin = std::min(margin, inner);
  }
  return margin;
}

double holder_seminorm_strided(const RadialProfile& profile, double nu, std::size_t stride) {
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("holder_seminorm: exponent must lie in (0, 1)");
  if (stride == 0) throw std::invalid_argument("holder_seminorm: stride must be positive");
  const std::size_t n = profile.size();
  if (n < 2) return 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  double best = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const std::size_t i = idx[a], j = idx[b];
      const double v = std::abs(profile.u[j] - profile.u[i]) / std::pow(profile.r[j] - profile.r[i], nu);
      best = std::max(best, v);
    }
  return best;
}

double holder_seminorm(const RadialProfile& profile, double nu) {
  const std::size_t M = profile.size() > 0 ? profile.size() - 1 : 0;
  std::size_t stride = 1;
  while (M / stride > 512) stride *= 2;
  return holder_seminorm_strided(profile, nu, stride);
}

TestFunction TestFunction::constant(std::span<const double> grid, double c) {
  TestFunction t{Kind::Constant, "constant " + fmt(c), {}};
  t.phi.r.assign(grid.begin(), grid.end());
  t.phi.u.assign(grid.size(), c);
  t.phi.du.assign(grid.size(), 0.0);
  return t;
}

TestFunction TestFunction::ramp(std::span<const double> grid, double a, double b) {
  TestFunction t{Kind::Ramp, "ramp " + fmt(a) + " + " + fmt(b) + " r", {}};
  t.phi.r.assign(grid.begin(), grid.end());
  t.phi.u.resize(grid.size());
  t.phi.du.assign(grid.size(), b);
  for (std::size_t i = 0; i < grid.size(); ++i) t.phi.u[i] = a + b * grid[i];
  return t;
}

TestFunction TestFunction::limit_profile(const RadialProfile& G) { return {Kind::LimitProfileG, "G", G}; }

TestFunction TestFunction::perturbed(const RadialProfile& base, const RadialProfile& direction, double eps,
                                     const std::string& label) {
  require_same_grid(base, direction);
  TestFunction t{Kind::Perturbed, "u " + std::string(eps < 0 ? "- " : "+ ") + fmt(std::abs(eps)) + " " + label, base};
  for (std::size_t i = 0; i < base.size(); ++i) {
    t.phi.u[i] += eps * direction.u[i];
    t.phi.du[i] += eps * direction.du[i];
  }
  return t;
}

TestFunction TestFunction::solution(const RadialProfile& u) { return {Kind::Solution, "u", u}; }

RadialProfile one_minus_r(std::span<const double> grid) {
  RadialProfile d;
  d.r.assign(grid.begin(), grid.end());
  d.u.resize(grid.size());
  d.du.assign(grid.size(), -1.0);
  for (std::size_t i = 0; i < grid.size(); ++i) d.u[i] = 1.0 - grid[i];
  return d;
}

std::vector<TestFunction> default_battery(const RadialProfile& u, const ProblemParams& params,
                                          const RadialProfile* G) {
  std::vector<TestFunction> battery;
  const auto& grid = u.r;
  for (double c : {params.value_bound(), 0.5, 1.0, 2.0}) battery.push_back(TestFunction::constant(grid, c));
  if (G != nullptr) battery.push_back(TestFunction::limit_profile(*G));
  battery.push_back(TestFunction::ramp(grid, 0.0, 1.0));
  battery.push_back(TestFunction::ramp(grid, 0.5, 1.0));
  const auto dir = one_minus_r(grid);
  for (double eps : {0.01, 0.1}) {
    battery.push_back(TestFunction::perturbed(u, dir, eps, "(1 - r)"));
    battery.push_back(TestFunction::perturbed(u, dir, -eps, "(1 - r)"));
  }
  battery.push_back(TestFunction::solution(u));
  return battery;
}

WeakInequalityReport weak_inequality_check(const RadialProfile& u, const ProblemParams& params,
                                           std::span<const TestFunction> battery) {
  if (battery.empty()) throw std::invalid_argument("weak_inequality_check: empty battery");
  const double q = params.q();
  const double lhs = norm_term(u, params);
  WeakInequalityReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (const auto& tf : battery) {
    require_same_grid(u, tf.phi);
    std::vector<double> coupling(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      coupling[i] = std::pow(std::abs(u.u[i]), q - 1.0) * (tf.phi.u[i] - u.u[i]);
    const double rhs = norm_term(tf.phi, params) - radial_integral(coupling, u.r, params);
    const double slack = rhs - lhs;
    rep.slacks.emplace_back(tf.name, slack);
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.worst_name = tf.name;
    }
  }
  return rep;
}

double weak_residual(const RadialProfile& u, const ProblemParams& params, const TestFunction& phi,
                     SourceTerm source) {
  require_same_grid(u, phi.phi);
  const RadialSystem sys(params, source);
  const double p = params.p();
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    f[i] = signed_power(u.du[i], p - 1.0) * phi.phi.du[i] + sys.source_value(u.u[i]) * phi.phi.u[i];
  return radial_integral(f, u.r, params);
}

std::vector<LocalMinRow> local_min_probe(const ProblemParams& params, const TruncationParams& trunc,
                                         std::span<const NamedDirection> directions,
                                         std::span<const double> eps_list, double delta_probe) {
  std::vector<LocalMinRow> rows;
  for (const auto& dir : directions) {
    const auto one = RadialProfile::constant(dir.profile.size() - 1, 1.0);
    require_same_grid(one, dir.profile);
    const double e_one = energy(one, params, trunc).energy;
    for (double eps : eps_list) {
      LocalMinRow row;
      row.direction = dir.name;
      row.eps = eps;
      RadialProfile base = one;
      for (std::size_t i = 0; i < base.size(); ++i) {
        base.u[i] += eps * dir.profile.u[i];
        base.du[i] += eps * dir.profile.du[i];
      }
      try {
        row.scale = nehari_project(base, params, trunc);
        const auto w = scaled(base, row.scale);
        row.distance = w1p_distance_to_constant(w, 1.0, params);
        row.energy_gap = energy(w, params, trunc).energy - e_one;
        row.in_cone = true;
        for (std::size_t i = 0; i < w.size(); ++i)
          if (w.u[i] < 0.0 || (i > 0 && w.u[i] < w.u[i - 1] - 1e-12)) row.in_cone = false;
        if (row.distance > delta_probe)
          row.error = "distance " + fmt(row.distance) + " exceeds delta_probe " + fmt(delta_probe);
      } catch (const std::exception& ex) {
        row.error = ex.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

int crossings_of_one(const RadialProfile& profile) {
  int count = 0;
  int last = 0;
  for (double v : profile.u) {
    const double s = v - 1.0;
    const int sign = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last != 0 && sign != last) ++count;
    last = sign;
  }
  return count;
}

bool Certificate::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* Certificate::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

Certificate certify_solution(const RadialProfile& u, const ProblemParams& params, const TruncationParams& trunc,
                             const RadialProfile* G, const CertificateOptions& opt) {
  Certificate cert;
  auto add = [&](std::string name, double value, double threshold, bool ok, std::string detail = {}) {
    cert.checks.push_back({std::move(name), value, threshold, ok, std::move(detail)});
  };

  if (u.size() < 3 || u.r.front() != 0.0 || u.r.back() != 1.0) {
    add("grid", 0.0, 0.0, false, "profile must cover [0, 1] on a uniform grid");
    return cert;
  }
  try {
    check_grid(u.u, u.r);
  } catch (const std::exception& ex) {
    add("grid", 0.0, 0.0, false, ex.what());
    return cert;
  }

  cert.energy = energy(u, params, trunc, opt.holder_exponent);
  const auto& e = cert.energy;

  const double du1 = std::abs(u.du.back());
  add("neumann", du1, opt.tol_neumann, du1 <= opt.tol_neumann, "|u'(1)|");

  const auto cone = cone_violation(u, opt.tol_cone);
  add("cone", cone ? 1.0 : 0.0, 0.0, !cone, cone.value_or("non-negative and non-decreasing"));

  bool is_one = true;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (std::abs(u.u[i] - 1.0) > opt.tol_cone || std::abs(u.du[i]) > opt.tol_cone) is_one = false;
  const bool signs = is_one || (u.u.front() < 1.0 && u.u.back() > 1.0);
  add("sign_facts", u.u.front(), 1.0, signs,
      is_one ? "u == 1" : "u(0) = " + fmt(u.u.front()) + ", u(1) = " + fmt(u.u.back()));
  const int crossings = crossings_of_one(u);
  add("single_crossing", crossings, 1.0, is_one || crossings == 1, std::to_string(crossings) + " crossings of 1");

  const auto ap = apriori_check(u, params, trunc, opt.tol_bounds);
  add("value_bound", ap.value_margin, -opt.tol_bounds, ap.value_margin >= -opt.tol_bounds,
      "min (q/p)^{1/(q-p)} - u");
  add("derivative_bound", ap.derivative_margin, -opt.tol_bounds, ap.derivative_margin >= -opt.tol_bounds,
      "min ((q-p)/(q(p-1)))^{1/p} - u'");
  const double rel = opt.tol_bounds * std::max(1.0, e.w1p_p);
  add("w1p_bound", ap.w1p_margin, -rel, ap.w1p_margin >= -rel, "|B|((q-p)/(q(p-1)) + (q/p)^{p/(q-p)}) - ||u||^p");
  add("energy_bound", std::min(ap.energy_vs_norm, ap.norm_vs_bound), -rel,
      ap.energy_vs_norm >= -rel && ap.norm_vs_bound >= -rel, "I_q <= ||u||^p/p <= (|B|/p)(q/p)^{p/(q-p)}");

  const auto L = lyapunov_series(u, params);
  const double inc = max_increase(L);
  add("lyapunov", inc, opt.tol_lyapunov, inc <= opt.tol_lyapunov, "max L(r_{i+1}) - L(r_i)");
  const double pp = phase_plane_margin(u, params);
  add("phase_plane", pp, -opt.tol_bounds, pp >= -opt.tol_bounds, "min distance inside Sigma");

  const double neh = e.w1p_p > 0.0 ? std::abs(e.nehari_residual) / e.w1p_p : std::abs(e.nehari_residual);
  add("nehari", neh, opt.tol_nehari, neh <= opt.tol_nehari, "|residual| / ||u||^p");

  const auto battery = default_battery(u, params, G);
  double worst_res = 0.0;
  std::string worst_res_name;
  for (const auto& tf : battery) {
    const double r = std::abs(weak_residual(u, params, tf));
    if (r > worst_res || worst_res_name.empty()) {
      worst_res = r;
      worst_res_name = tf.name;
    }
  }
  add("weak_residual", worst_res, opt.tol_residual, worst_res <= opt.tol_residual, "worst at " + worst_res_name);

  const auto wi = weak_inequality_check(u, params, battery);
  add("weak_inequality", wi.worst_slack, -opt.tol_slack, wi.worst_slack >= -opt.tol_slack,
      "worst at " + wi.worst_name);
  return cert;
}

}  // namespace plap
