#include "plap/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace plap {

double signed_power(double s, double alpha) {
  if (s == 0.0) return 0.0;
  const double m = std::pow(std::abs(s), alpha);
  return s > 0.0 ? m : -m;
}

double ball_measure(int N) {
  if (N < 1) throw std::invalid_argument("ball_measure: dimension N must be >= 1");
  const double half = 0.5 * N;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

ProblemParams::ProblemParams(int N, double p, double q) : N_(N), p_(p), q_(q) {
  if (N < 1) throw std::invalid_argument("invariant N >= 1 violated (N = " + std::to_string(N) + ")");
  if (!(p > 1.0 && p <= 2.0)) {
    std::ostringstream os;
    os << "invariant 1 < p <= 2 violated (p = " << p << ")";
    throw std::invalid_argument(os.str());
  }
  if (!(q > p) || !std::isfinite(q)) {
    std::ostringstream os;
    os << "invariant q > p violated (p = " << p << ", q = " << q << ")";
    throw std::invalid_argument(os.str());
  }
  ball_volume_ = ball_measure(N);
}

double ProblemParams::critical_exponent() const {
  if (p_ < N_) return N_ * p_ / (N_ - p_);
  return std::numeric_limits<double>::infinity();
}

double ProblemParams::value_bound() const { return std::pow(q_ / p_, 1.0 / (q_ - p_)); }

double ProblemParams::derivative_bound() const {
  return std::pow((q_ - p_) / (q_ * (p_ - 1.0)), 1.0 / p_);
}

TruncationParams TruncationParams::defaults(const ProblemParams& params) {
  const double p = params.p();
  const double k = 2.0 + std::pow(params.conjugate_exponent(), 1.0 / p);
  const double pstar = params.critical_exponent();
  double ell = 0.5 * (p + std::min(pstar, p + 2.0));
  // Midpoint is already strictly inside (p, p*); the clip only guards p* close to p.
  if (ell >= pstar) ell = 0.5 * (p + pstar);
  return {std::max(4.0, k), ell};
}

void TruncationParams::validate(const ProblemParams& params) const {
  const double p = params.p();
  const double kmin = 2.0 + std::pow(params.conjugate_exponent(), 1.0 / p);
  if (!(s0 >= kmin)) {
    std::ostringstream os;
    os << "invariant s0 >= 2 + (p')^{1/p} = " << kmin << " violated (s0 = " << s0 << ")";
    throw std::invalid_argument(os.str());
  }
  if (!(ell > p && ell < params.critical_exponent())) {
    std::ostringstream os;
    os << "invariant p < ell < p* violated (ell = " << ell << ")";
    throw std::invalid_argument(os.str());
  }
}

double truncated_f(double s, const ProblemParams& params, const TruncationParams& trunc) {
  if (s < 0.0) throw std::domain_error("truncated_f: argument must be nonnegative");
  const double q = params.q();
  if (s <= trunc.s0) return std::pow(s, q - 1.0);
  const double s0 = trunc.s0;
  const double l = trunc.ell;
  return std::pow(s0, q - 1.0) +
         (q - 1.0) / (l - 1.0) * std::pow(s0, q - l) * (std::pow(s, l - 1.0) - std::pow(s0, l - 1.0));
}

double truncated_F(double s, const ProblemParams& params, const TruncationParams& trunc) {
  if (s < 0.0) throw std::domain_error("truncated_F: argument must be nonnegative");
  const double q = params.q();
  if (s <= trunc.s0) return std::pow(s, q) / q;
  const double s0 = trunc.s0;
  const double l = trunc.ell;
  const double tail = (std::pow(s, l) - std::pow(s0, l)) / l - std::pow(s0, l - 1.0) * (s - s0);
  return std::pow(s0, q) / q + std::pow(s0, q - 1.0) * (s - s0) +
         (q - 1.0) / (l - 1.0) * std::pow(s0, q - l) * tail;
}

double constant_energy(const ProblemParams& params) {
  return params.ball_volume() * (1.0 / params.p() - 1.0 / params.q());
}

std::vector<double> RadialProfile::uniform_grid(std::size_t M) {
  if (M == 0) throw std::invalid_argument("uniform_grid: need at least one interval");
  std::vector<double> r(M + 1);
  for (std::size_t i = 0; i <= M; ++i) r[i] = static_cast<double>(i) / static_cast<double>(M);
  return r;
}

RadialProfile RadialProfile::constant(std::size_t M, double value) {
  RadialProfile prof;
  prof.r = uniform_grid(M);
  prof.u.assign(M + 1, value);
  prof.du.assign(M + 1, 0.0);
  return prof;
}

std::optional<std::string> cone_violation(const RadialProfile& profile, double tol_cone) {
  const auto n = profile.size();
  if (n == 0) return "empty profile";
  if (profile.u.size() != n || profile.du.size() != n) return "inconsistent profile lengths";
  for (std::size_t i = 1; i < n; ++i)
    if (!(profile.r[i] > profile.r[i - 1])) return "nodes not strictly increasing at index " + std::to_string(i);
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(profile.u[i]) || !std::isfinite(profile.du[i])) {
      os << "non-finite sample at r = " << profile.r[i];
      return os.str();
    }
    if (profile.u[i] < -tol_cone) {
      os << "cone: negative value u = " << profile.u[i] << " at r = " << profile.r[i];
      return os.str();
    }
    if (i > 0 && profile.u[i] < profile.u[i - 1] - tol_cone) {
      os << "cone: decrease u(" << profile.r[i] << ") - u(" << profile.r[i - 1]
         << ") = " << profile.u[i] - profile.u[i - 1];
      return os.str();
    }
    if (profile.du[i] < -tol_cone) {
      os << "cone: negative derivative du = " << profile.du[i] << " at r = " << profile.r[i];
      return os.str();
    }
  }
  if (std::abs(profile.du.front()) > tol_cone) {
    os << "regularity: du(0) = " << profile.du.front() << " != 0";
    return os.str();
  }
  return std::nullopt;
}

}  // namespace plap
