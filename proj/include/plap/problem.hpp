#pragma once

// Problem instance for  -Δ_p u + u^{p-1} = u^{q-1}  in the unit ball of R^N
// with homogeneous Neumann data, restricted to radial non-decreasing profiles.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace plap {

/// |s|^{alpha-1} s, the odd power used for the p-Laplacian flux.
double signed_power(double s, double alpha);

/// Lebesgue measure of the unit ball in R^N.
double ball_measure(int N);

class ProblemParams {
public:
  /// Throws std::invalid_argument naming the violated constraint.
  ProblemParams(int N, double p, double q);

  int N() const { return N_; }
  double p() const { return p_; }
  double q() const { return q_; }

  double conjugate_exponent() const { return p_ / (p_ - 1.0); }
  double ball_volume() const { return ball_volume_; }
  /// Surface measure of the unit sphere, N |B|.
  double sphere_measure() const { return N_ * ball_volume_; }
  /// Critical Sobolev exponent Np/(N-p), or +inf when p >= N.
  double critical_exponent() const;

  /// A priori bounds for cone solutions.
  double value_bound() const;      // (q/p)^{1/(q-p)}
  double derivative_bound() const; // ((q-p)/(q(p-1)))^{1/p}

  ProblemParams with_q(double q) const { return ProblemParams(N_, p_, q); }

private:
  int N_;
  double p_;
  double q_;
  double ball_volume_;
};

/// Truncation height and subcritical growth exponent of f_q.
struct TruncationParams {
  double s0;
  double ell;

  /// s0 = max(4, 2 + (p')^{1/p}); ell = midpoint of (p, min(p*, p+2)).
  static TruncationParams defaults(const ProblemParams& params);

  /// Throws std::invalid_argument when s0 or ell is inadmissible for params.
  void validate(const ProblemParams& params) const;
};

/// f_q: s^{q-1} up to s0, continued with s^{ell-1} growth (C^1 at s0).
double truncated_f(double s, const ProblemParams& params, const TruncationParams& trunc);
/// F_q(s) = ∫_0^s f_q.
double truncated_F(double s, const ProblemParams& params, const TruncationParams& trunc);

/// I_q(1) = |B| (1/p - 1/q).
double constant_energy(const ProblemParams& params);

/// Radial function sampled on nodes 0 = r_0 < ... < r_M (= 1 for complete profiles).
struct RadialProfile {
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> du;

  std::size_t size() const { return r.size(); }
  bool empty() const { return r.empty(); }

  /// Uniform grid on [0,1] with M intervals, filled with a constant.
  static RadialProfile constant(std::size_t M, double value);
  /// Uniform grid on [0,1] with M intervals.
  static std::vector<double> uniform_grid(std::size_t M);
};

/// First cone violation found, or nullopt when the profile lies in the cone.
/// Checks nonnegativity, non-decreasing values, du >= -tol and du(0) = 0.
std::optional<std::string> cone_violation(const RadialProfile& profile, double tol_cone);

}  // namespace plap
