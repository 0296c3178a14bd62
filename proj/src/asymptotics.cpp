#include "plap/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "plap/functionals.hpp"
#include "plap/parallel.hpp"

namespace plap {

LimitProfile compute_G(const ProblemParams& params, const IntegratorControls& controls) {
  const auto res = integrate(1.0, params, controls.tightened(), SourceTerm::LimitOnly);
  if (res.status != IvpStatus::ReachedOne)
    throw std::runtime_error(std::string("compute_G: limit trajectory ended with ") + to_string(res.status));
  LimitProfile G;
  G.raw_endpoint = res.profile.u.back();
  G.profile = scaled(res.profile, 1.0 / G.raw_endpoint);
  G.profile.u.back() = 1.0;
  G.dirichlet_value = G.profile.u.back();
  const double p = params.p();
  std::vector<double> f(G.profile.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = std::pow(std::abs(G.profile.du[i]), p) + std::pow(std::abs(G.profile.u[i]), p);
  G.norm_p = radial_integral(f, G.profile.r, params);
  return G;
}

double limit_residual_worst(const LimitProfile& G, const ProblemParams& params) {
  const auto& grid = G.profile.r;
  std::vector<TestFunction> battery;
  battery.push_back(TestFunction::ramp(grid, 1.0, -1.0));
  TestFunction quad{TestFunction::Kind::Ramp, "1 - r^2", TestFunction::constant(grid, 0.0).phi};
  TestFunction damped{TestFunction::Kind::Perturbed, "G (1 - r)", G.profile};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    quad.phi.u[i] = 1.0 - r * r;
    quad.phi.du[i] = -2.0 * r;
    damped.phi.u[i] = G.profile.u[i] * (1.0 - r);
    damped.phi.du[i] = G.profile.du[i] * (1.0 - r) - G.profile.u[i];
  }
  battery.push_back(std::move(quad));
  battery.push_back(std::move(damped));
  double worst = 0.0;
  for (const auto& tf : battery)
    worst = std::max(worst, std::abs(weak_residual(G.profile, params, tf, SourceTerm::LimitOnly)));
  return worst;
}

namespace {

SweepEntry sweep_one(const ProblemParams& params, const LimitProfile& G, const ShootingOptions& shooting) {
  SweepEntry entry;
  auto& rec = entry.record;
  rec.q = params.q();
  rec.I_const = constant_energy(params);
  const auto set = find_solutions(params, shooting);
  rec.accepted_roots = set.accepted().size();
  rec.high_energy_roots = 0;
  for (const auto* r : set.accepted())
    if (r->label == RootLabel::HighEnergy) ++rec.high_energy_roots;

  std::vector<std::string> missing;
  if (const auto* u = set.low_energy()) {
    const auto& prof = u->profile();
    rec.d_u = u->d;
    rec.I_u = u->energy.energy;
    rec.sup_dist_u = sup_distance(prof, G.profile);
    rec.w1p_dist_u = w1p_distance(prof, G.profile, params);
    entry.u_q = prof;
  } else {
    missing.push_back("no accepted LowEnergy root");
  }
  if (const auto* v = set.high_energy()) {
    const auto& prof = v->profile();
    rec.d_v = v->d;
    rec.I_v = v->energy.energy;
    double sup = 0.0;
    for (double x : prof.u) sup = std::max(sup, std::abs(x - 1.0));
    rec.sup_dist_v = sup;
    rec.w1p_dist_v = w1p_distance_to_constant(prof, 1.0, params);
    rec.holder_dist_v = holder_seminorm(prof, 0.5);
    rec.energy_ratio = params.p() * v->energy.energy / params.ball_volume();
    rec.q_term_v = v->energy.q_term;
    entry.v_q = prof;
  } else {
    missing.push_back("no accepted HighEnergy root");
  }
  if (!missing.empty()) {
    std::ostringstream os;
    os << "q = " << rec.q << ": ";
    for (std::size_t i = 0; i < missing.size(); ++i) os << (i ? "; " : "") << missing[i];
    rec.failure = os.str();
  }
  return entry;
}

}  // namespace

std::vector<SweepEntry> sweep(const ProblemParams& base, std::span<const double> q_list, const LimitProfile& G,
                              const SweepOptions& options) {
  for (std::size_t i = 0; i < q_list.size(); ++i) {
    if (!(q_list[i] > base.p())) throw std::invalid_argument("sweep: every q must exceed p");
    if (i > 0 && !(q_list[i] > q_list[i - 1])) throw std::invalid_argument("sweep: q_list must be strictly increasing");
  }
  const std::size_t outer = std::min(resolve_workers(options.workers), std::max<std::size_t>(q_list.size(), 1));
  ShootingOptions shooting = options.shooting;
  if (outer > 1) shooting.workers = 1;
  return parallel_map<SweepEntry>(q_list.size(), outer, [&](std::size_t i) {
    try {
      return sweep_one(base.with_q(q_list[i]), G, shooting);
    } catch (const std::exception& ex) {
      SweepEntry failed;
      failed.record.q = q_list[i];
      failed.record.I_const = constant_energy(base.with_q(q_list[i]));
      failed.record.failure = std::string("q = ") + std::to_string(q_list[i]) + ": " + ex.what();
      return failed;
    }
  });
}

std::vector<DerivativeRow> derivative_convergence_check(std::span<const SweepEntry> entries, const LimitProfile& G,
                                                        double R) {
  std::vector<DerivativeRow> rows;
  if (!(R > 0.0)) return rows;
  for (const auto& e : entries) {
    DerivativeRow row;
    row.q = e.record.q;
    if (e.u_q) {
      double dev = 0.0;
      for (std::size_t i = 0; i < e.u_q->size(); ++i) {
        const double r = e.u_q->r[i];
        if (r <= 0.0 || r > R) continue;
        dev = std::max(dev, std::abs(e.u_q->du[i] - G.profile.du[i]));
      }
      row.u_dev = dev;
    }
    if (e.v_q) {
      double dev = 0.0;
      for (std::size_t i = 0; i < e.v_q->size(); ++i) {
        const double r = e.v_q->r[i];
        if (r <= 0.0 || r > R) continue;
        dev = std::max(dev, std::abs(e.v_q->du[i]));
      }
      row.v_dev = dev;
    }
    rows.push_back(row);
  }
  return rows;
}

RateFit rate_fit(std::span<const std::pair<double, double>> series) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [q, v] : series) {
    if (!(v > 0.0) || !(q > 0.0)) continue;
    pts.emplace_back(std::log(q), std::log(v));
  }
  if (pts.size() < 3) throw std::invalid_argument("rate_fit: need at least three positive values");
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  RateFit fit;
  fit.used = pts.size();
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (const auto& [x, y] : pts) {
    const double e = y - (fit.intercept + fit.slope * x);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

bool strictly_decreasing(std::span<const std::optional<double>> series) {
  if (series.empty()) return false;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series[i]) return false;
    if (i > 0 && !(*series[i] < *series[i - 1])) return false;
  }
  return true;
}

}  // namespace plap
