#include "plap/ivp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plap {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Hairer-Wanner DOPRI5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

using Vec2 = std::array<double, 2>;

struct DenseStep {
  double r0, h;
  Vec2 y1;
  std::array<Vec2, 5> coef;

  Vec2 at(double r) const {
    if (r >= r0 + h) return y1;
    const double th = (r - r0) / h;
    const double th1 = 1.0 - th;
    Vec2 out{};
    for (int k = 0; k < 2; ++k)
      out[k] = coef[0][k] + th * (coef[1][k] + th1 * (coef[2][k] + th * (coef[3][k] + th1 * coef[4][k])));
    return out;
  }
};

bool finite(const Vec2& v) { return std::isfinite(v[0]) && std::isfinite(v[1]); }

}  // namespace

IntegratorControls IntegratorControls::tightened() const {
  IntegratorControls c = *this;
  c.rel_tol = std::min(rel_tol, 1e-12);
  c.abs_tol = std::min(abs_tol, 1e-14);
  return c;
}

double resolved_u_cap(const IntegratorControls& controls, const ProblemParams& params) {
  if (controls.u_cap > 0.0) return controls.u_cap;
  const auto trunc = TruncationParams::defaults(params);
  return 10.0 * std::max(trunc.s0, params.value_bound());
}

const char* to_string(IvpStatus status) {
  switch (status) {
    case IvpStatus::ReachedOne: return "ReachedOne";
    case IvpStatus::BlewUp: return "BlewUp";
    case IvpStatus::StepBudgetExhausted: return "StepBudgetExhausted";
  }
  return "?";
}

double RadialSystem::source_value(double u) const {
  const double lower = signed_power(u, p - 1.0);
  if (source == SourceTerm::LimitOnly) return lower;
  return lower - signed_power(u, q - 1.0);
}

double RadialSystem::derivative_from_flux(double r, double w) const {
  if (r == 0.0) return 0.0;
  const double ratio = N == 1 ? w : w / std::pow(r, N - 1);
  return signed_power(ratio, 1.0 / (p - 1.0));
}

void RadialSystem::rhs(double r, double u, double w, double& du, double& dw) const {
  du = derivative_from_flux(r, w);
  const double weight = N == 1 ? 1.0 : std::pow(r, N - 1);
  dw = weight * source_value(u);
}

IvpState series_state(double d, double r, const ProblemParams& params, SourceTerm source) {
  const RadialSystem sys(params, source);
  const int N = params.N();
  const double p = params.p();
  const double c0 = sys.source_value(d);
  IvpState s;
  s.r = r;
  if (r == 0.0) {
    s.u = d;
    s.w = 0.0;
    return s;
  }
  s.w = c0 * std::pow(r, N) / N;
  s.u = d + (p - 1.0) / p * signed_power(c0 / N, 1.0 / (p - 1.0)) * std::pow(r, p / (p - 1.0));
  return s;
}

IvpState series_start(double d, const ProblemParams& params, const IntegratorControls& controls,
                      SourceTerm source) {
  return series_state(d, controls.eps0, params, source);
}

IvpResult integrate(double d, const ProblemParams& params, const IntegratorControls& controls,
                    SourceTerm source) {
  if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("integrate: initial height d must be > 0");
  if (!(controls.eps0 > 0.0 && controls.eps0 < 1.0))
    throw std::invalid_argument("integrate: eps0 must lie in (0, 1)");
  if (controls.report_intervals == 0) throw std::invalid_argument("integrate: report grid needs >= 1 interval");

  const RadialSystem sys(params, source);
  const double u_cap = resolved_u_cap(controls, params);
  const std::size_t M = controls.report_intervals;
  const auto grid = RadialProfile::uniform_grid(M);

  IvpResult result;
  auto& prof = result.profile;
  prof.r.reserve(M + 1);
  prof.u.reserve(M + 1);
  prof.du.reserve(M + 1);

  auto emit = [&](double r, double u, double w) {
    prof.r.push_back(r);
    prof.u.push_back(u);
    prof.du.push_back(sys.derivative_from_flux(r, w));
  };

  std::size_t next = 0;
  while (next <= M && grid[next] <= controls.eps0) {
    const auto s = series_state(d, grid[next], params, source);
    emit(s.r, s.u, s.w);
    ++next;
  }

  const IvpState start = series_start(d, params, controls, source);
  double r = start.r;
  Vec2 y{start.u, start.w};
  Vec2 k1{};
  sys.rhs(r, y[0], y[1], k1[0], k1[1]);

  const double atol = controls.abs_tol;
  const double rtol = controls.rel_tol;
  double h = std::min(1e-3, 1.0 - r);
  std::size_t attempts = 0;

  auto eval = [&](double rr, const Vec2& yy) {
    Vec2 k{};
    sys.rhs(rr, yy[0], yy[1], k[0], k[1]);
    return k;
  };

  while (r < 1.0) {
    if (attempts++ >= controls.max_steps) {
      result.status = IvpStatus::StepBudgetExhausted;
      result.terminal = {r, y[0], y[1]};
      return result;
    }
    const bool last = r + h >= 1.0;
    if (last) h = 1.0 - r;

    Vec2 y2, y3, y4, y5, y6, y7;
    for (int i = 0; i < 2; ++i) y2[i] = y[i] + h * a21 * k1[i];
    const Vec2 k2 = eval(r + c2 * h, y2);
    for (int i = 0; i < 2; ++i) y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const Vec2 k3 = eval(r + c3 * h, y3);
    for (int i = 0; i < 2; ++i) y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const Vec2 k4 = eval(r + c4 * h, y4);
    for (int i = 0; i < 2; ++i) y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const Vec2 k5 = eval(r + c5 * h, y5);
    for (int i = 0; i < 2; ++i)
      y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double r_new = last ? 1.0 : r + h;
    const Vec2 k6 = eval(r_new, y6);
    for (int i = 0; i < 2; ++i)
      y7[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    const Vec2 k7 = eval(r_new, y7);

    double err = 0.0;
    bool ok = finite(y7) && finite(k7);
    if (ok) {
      for (int i = 0; i < 2; ++i) {
        const double est = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y7[i]));
        err += (est / sc) * (est / sc);
      }
      err = std::sqrt(0.5 * err);
      ok = std::isfinite(err);
    }

    if (!ok || err > 1.0) {
      ++result.rejected_steps;
      const double fac = ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= std::min(1.0, fac);
      continue;
    }

    ++result.accepted_steps;
    DenseStep dense{r, h, y7, {}};
    for (int i = 0; i < 2; ++i) {
      const double ydiff = y7[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      dense.coef[0][i] = y[i];
      dense.coef[1][i] = ydiff;
      dense.coef[2][i] = bspl;
      dense.coef[3][i] = ydiff - h * k7[i] - bspl;
      dense.coef[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }

    if (y7[0] >= u_cap) {
      // Locate the first crossing of u_cap on the continuous extension.
      double lo = r, hi = r_new;
      for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dense.at(mid)[0] >= u_cap)
          hi = mid;
        else
          lo = mid;
      }
      while (next <= M && grid[next] < hi) {
        const Vec2 s = dense.at(grid[next]);
        emit(grid[next], s[0], s[1]);
        ++next;
      }
      const Vec2 s = hi >= r_new ? y7 : dense.at(hi);
      result.status = IvpStatus::BlewUp;
      result.blowup_radius = hi;
      result.terminal = {hi, std::max(s[0], u_cap), s[1]};
      return result;
    }

    while (next <= M && grid[next] <= r_new) {
      const Vec2 s = grid[next] >= r_new ? y7 : dense.at(grid[next]);
      emit(grid[next], s[0], s[1]);
      ++next;
    }

    r = r_new;
    y = y7;
    k1 = k7;
    const double fac = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    h *= fac;
  }

  result.status = IvpStatus::ReachedOne;
  result.terminal = {1.0, y[0], y[1]};
  return result;
}

OrderProbeResult convergence_order_probe(const ProblemParams& params, const IntegratorControls& controls,
                                         double d, double r_min, SourceTerm source, double base_tol) {
  OrderProbeResult out;
  IntegratorControls ref_controls = controls;
  ref_controls.rel_tol = 1e-14;
  ref_controls.abs_tol = 1e-16;
  const auto ref = integrate(d, params, ref_controls, source);

  for (int k = 0; k < 3; ++k) {
    IntegratorControls c = controls;
    c.rel_tol = base_tol * std::pow(10.0, -k);
    c.abs_tol = c.rel_tol * 1e-2;
    const auto run = integrate(d, params, c, source);
    if (run.status != IvpStatus::ReachedOne || ref.status != IvpStatus::ReachedOne)
      throw std::runtime_error("convergence_order_probe: trajectory did not reach r = 1");
    double err = 0.0;
    for (std::size_t i = 0; i < run.profile.size(); ++i) {
      if (run.profile.r[i] < r_min) continue;
      err = std::max(err, std::abs(run.profile.u[i] - ref.profile.u[i]));
    }
    err = std::max(err, std::abs(run.terminal.w - ref.terminal.w));
    out.tolerances.push_back(c.rel_tol);
    out.errors.push_back(err);
    out.steps.push_back(run.accepted_steps);
  }

  if (std::all_of(out.errors.begin(), out.errors.end(), [](double e) { return e == 0.0; })) {
    out.degenerate = true;
    return out;
  }
  // Least-squares slope of -log(err) against log(steps).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < out.errors.size(); ++k) {
    if (out.errors[k] <= 0.0) continue;
    const double x = std::log(static_cast<double>(out.steps[k]));
    const double yv = -std::log(out.errors[k]);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    ++n;
  }
  if (n < 2) {
    out.degenerate = true;
    return out;
  }
  out.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

}  // namespace plap
