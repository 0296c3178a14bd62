#include "plap/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plap/parallel.hpp"

namespace plap {

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

ShootingOutcome shoot(double d, const ProblemParams& params, const IntegratorControls& controls) {
  ShootingOutcome out;
  out.d = d;
  out.result = integrate(d, params, controls);
  switch (out.result.status) {
    case IvpStatus::ReachedOne: out.miss = out.result.terminal.w; break;
    case IvpStatus::BlewUp: out.miss = kBlowUpMiss; break;
    case IvpStatus::StepBudgetExhausted: out.miss = std::numeric_limits<double>::quiet_NaN(); break;
  }
  return out;
}

double miss(double d, const ProblemParams& params, const IntegratorControls& controls) {
  return shoot(d, params, controls).miss;
}

std::vector<double> ScanSpec::points() const {
  if (!(d_min > 0.0 && d_min < 1.0 - min_gap)) throw std::invalid_argument("ScanSpec: need 0 < d_min < 1 - min_gap");
  if (log_points < 2) throw std::invalid_argument("ScanSpec: need at least two scan points");
  std::vector<double> pts;
  const double d_max = 1.0 - min_gap;
  const double ratio = std::log(d_max / d_min);
  for (std::size_t k = 0; k < log_points; ++k)
    pts.push_back(d_min * std::exp(ratio * static_cast<double>(k) / static_cast<double>(log_points - 1)));
  pts.back() = d_max;
  if (ladder_per_octave > 0) {
    for (std::size_t k = 0;; ++k) {
      const double gap = ladder_spread * std::exp2(-static_cast<double>(k) / static_cast<double>(ladder_per_octave));
      if (gap < min_gap) break;
      pts.push_back(1.0 - gap);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

const char* to_string(RootLabel label) {
  switch (label) {
    case RootLabel::LowEnergy: return "LowEnergy";
    case RootLabel::HighEnergy: return "HighEnergy";
    case RootLabel::Ambiguous: return "Ambiguous";
    case RootLabel::Rejected: return "Rejected";
  }
  return "?";
}

std::vector<const RootInfo*> SolutionSet::accepted() const {
  std::vector<const RootInfo*> out;
  for (const auto& r : roots)
    if (r.accepted()) out.push_back(&r);
  return out;
}

const RootInfo* SolutionSet::low_energy() const {
  const RootInfo* best = nullptr;
  for (const auto& r : roots)
    if (r.accepted() && r.label == RootLabel::LowEnergy && (!best || r.energy.energy < best->energy.energy))
      best = &r;
  return best;
}

const RootInfo* SolutionSet::high_energy() const {
  const RootInfo* best = nullptr;
  for (const auto& r : roots)
    if (r.accepted() && r.label == RootLabel::HighEnergy && (!best || std::abs(1.0 - r.d) < std::abs(1.0 - best->d)))
      best = &r;
  return best;
}

std::size_t SolutionSet::count(RootLabel label) const {
  return static_cast<std::size_t>(
      std::count_if(roots.begin(), roots.end(), [&](const RootInfo& r) { return r.label == label; }));
}

RootLabel classify(const RadialProfile& profile, const ProblemParams& params, const TruncationParams& trunc,
                   double margin_tol) {
  const double gap = energy(profile, params, trunc).energy - constant_energy(params);
  if (gap > margin_tol) return RootLabel::HighEnergy;
  if (gap < -margin_tol) return RootLabel::LowEnergy;
  return RootLabel::Ambiguous;
}

RootLabel classify(const RadialProfile& profile, const ProblemParams& params, const TruncationParams& trunc) {
  const auto e = energy(profile, params, trunc);
  return classify(profile, params, trunc, ShootingOptions{}.margin_factor * e.quadrature_error);
}

double refine_root(double lo, double hi, const ProblemParams& params, const IntegratorControls& controls,
                   double d_tol) {
  if (lo > hi) std::swap(lo, hi);
  const double m_lo = miss(lo, params, controls);
  const int s_lo = sign_of(m_lo);
  if (s_lo == 0) return lo;
  for (int it = 0; it < 200 && hi - lo > d_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double m = miss(mid, params, controls);
    if (std::isnan(m)) break;
    const int s = sign_of(m);
    if (s == 0) return mid;
    if (s == s_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

SolutionSet find_solutions(const ProblemParams& params, const ShootingOptions& options) {
  const auto trunc = options.trunc.value_or(TruncationParams::defaults(params));
  const auto& scan = options.scan;
  const auto tight = options.controls.tightened();

  SolutionSet set;
  set.constant_energy = constant_energy(params);
  set.scan_d = scan.points();
  const auto n = set.scan_d.size();
  set.scan_miss = parallel_map<double>(n, options.workers,
                                       [&](std::size_t i) { return miss(set.scan_d[i], params, options.controls); });

  struct Bracket {
    double lo, hi;
  };
  std::vector<Bracket> brackets;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = set.scan_miss[i], b = set.scan_miss[i + 1];
    if (std::isnan(a) || std::isnan(b)) continue;
    if (a == 0.0) {
      brackets.push_back({set.scan_d[i], set.scan_d[i]});
      continue;
    }
    if (sign_of(a) * sign_of(b) < 0) brackets.push_back({set.scan_d[i], set.scan_d[i + 1]});
  }

  const auto refined = parallel_map<double>(brackets.size(), options.workers, [&](std::size_t i) {
    const auto& br = brackets[i];
    if (br.lo == br.hi) return br.lo;
    return refine_root(br.lo, br.hi, params, tight, scan.d_tol);
  });

  std::vector<std::size_t> order(brackets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return refined[a] < refined[b]; });

  std::vector<RootInfo> candidates;
  for (std::size_t idx : order) {
    const double d = refined[idx];
    if (std::abs(1.0 - d) < scan.exclusion_radius) continue;
    if (!candidates.empty() && std::abs(d - candidates.back().d) < 10.0 * scan.d_tol) {
      ++set.duplicates_collapsed;
      continue;
    }
    RootInfo info;
    info.d = d;
    info.bracket_lo = brackets[idx].lo;
    info.bracket_hi = brackets[idx].hi;
    candidates.push_back(std::move(info));
  }

  set.roots = parallel_map<RootInfo>(candidates.size(), options.workers, [&](std::size_t i) {
    RootInfo info = candidates[i];
    info.outcome = shoot(info.d, params, tight);
    const auto& res = info.outcome.result;
    if (res.status != IvpStatus::ReachedOne) {
      info.label = RootLabel::Rejected;
      info.rejection = std::string("integration ended with ") + to_string(res.status);
      return info;
    }
    const auto& prof = res.profile;
    info.energy = energy(prof, params, trunc);
    info.energy_gap = info.energy.energy - set.constant_energy;
    info.margin_tol = options.margin_factor * info.energy.quadrature_error;

    std::ostringstream why;
    why.precision(6);
    const double du1 = std::abs(prof.du.back());
    if (du1 > options.tol_neumann) {
      why << "neumann: |u'(1)| = " << du1 << " > " << options.tol_neumann;
    } else if (auto cone = cone_violation(prof, options.tol_cone)) {
      why << *cone;
    } else if (!(prof.u.front() < 1.0 && prof.u.back() > 1.0)) {
      why << "sign facts: u(0) = " << prof.u.front() << ", u(1) = " << prof.u.back();
    }
    if (!why.str().empty()) {
      info.label = RootLabel::Rejected;
      info.rejection = why.str();
      return info;
    }
    if (info.energy_gap > info.margin_tol)
      info.label = RootLabel::HighEnergy;
    else if (info.energy_gap < -info.margin_tol)
      info.label = RootLabel::LowEnergy;
    else
      info.label = RootLabel::Ambiguous;
    return info;
  });
  return set;
}

}  // namespace plap
