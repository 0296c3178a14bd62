#pragma once

// Radial quadrature of the energy functional and of the identities/estimates
// satisfied by cone solutions, plus the certificate battery built from them.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/ivp.hpp"
#include "plap/problem.hpp"

namespace plap {

/// ω ∫_0^1 f(r) r^{N-1} dr by composite Simpson on a uniform grid (3/8 rule
/// closes an odd interval count). Throws std::invalid_argument on a
/// non-uniform grid or a length mismatch.
double radial_integral(std::span<const double> f, std::span<const double> r, const ProblemParams& params);

/// Richardson estimate |S_h - S_2h| / 15 of the radial_integral error.
double radial_integral_error(std::span<const double> f, std::span<const double> r,
                             const ProblemParams& params);

struct EnergyReport {
  double energy = 0.0;
  double w1p_p = 0.0;       // ∫ |u'|^p + |u|^p
  double sup = 0.0;
  double holder = 0.0;      // discrete C^{0,ν} seminorm
  double holder_exponent = 0.5;
  double nehari_residual = 0.0;  // w1p_p - ∫ f_q(u) u
  double q_term = 0.0;      // ∫ F_q(u), = ∫ u^q/q when sup <= s0
  double quadrature_error = 0.0;
  bool truncated = false;   // F_q evaluated above s0 somewhere
};

EnergyReport energy(const RadialProfile& profile, const ProblemParams& params, const TruncationParams& trunc,
                    double holder_exponent = 0.5);

/// ‖u - v‖_{W^{1,p}} for profiles on the same grid.
double w1p_distance(const RadialProfile& a, const RadialProfile& b, const ProblemParams& params);
/// ‖u - c‖_{W^{1,p}} against a constant.
double w1p_distance_to_constant(const RadialProfile& a, double c, const ProblemParams& params);
double sup_distance(const RadialProfile& a, const RadialProfile& b);

class TruncationRegimeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Scale t with t u ∈ N_q in the pure-power regime, t = (w1p_p / ∫u^q)^{1/(q-p)}.
/// Throws TruncationRegimeError when t sup u > s0, std::invalid_argument for u ≡ 0.
double nehari_project(const RadialProfile& profile, const ProblemParams& params, const TruncationParams& trunc);

RadialProfile scaled(const RadialProfile& profile, double t);

struct AprioriReport {
  double value_margin = 0.0;       // min_i bound - u_i
  double derivative_margin = 0.0;  // min_i bound - u'_i
  double w1p_margin = 0.0;         // |B|((q-p)/(q(p-1)) + (q/p)^{p/(q-p)}) - w1p_p
  double energy_vs_norm = 0.0;     // w1p_p/p - I_q
  double norm_vs_bound = 0.0;      // (|B|/p)(q/p)^{p/(q-p)} - w1p_p/p
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

AprioriReport apriori_check(const RadialProfile& profile, const ProblemParams& params,
                            const TruncationParams& trunc, double tol = 1e-8);

/// Node-wise (p-1)/p |u'|^p - u^p/p + u^q/q.
std::vector<double> lyapunov_series(const RadialProfile& profile, const ProblemParams& params);
/// max_i L(r_{i+1}) - L(r_i); <= 0 for a non-increasing series.
double max_increase(std::span<const double> series);

/// min_i ( [p/(p-1) (u^p/p - u^q/q)]^{1/p} - u'_i ); negative where (u, u') leaves Σ.
double phase_plane_margin(const RadialProfile& profile, const ProblemParams& params);

/// max over node pairs of |u_i - u_j| / |r_i - r_j|^ν. All pairs for M <= 512;
/// above that, nodes with index divisible by the smallest power-of-two stride
/// leaving <= 512 intervals, plus the last node.
double holder_seminorm(const RadialProfile& profile, double nu);
/// Same maximum over nodes with index divisible by `stride` plus the last node.
double holder_seminorm_strided(const RadialProfile& profile, double nu, std::size_t stride);

struct TestFunction {
  enum class Kind { Constant, LimitProfileG, Ramp, Perturbed, Solution };
  Kind kind;
  std::string name;
  RadialProfile phi;

  static TestFunction constant(std::span<const double> grid, double c);
  /// a + b r
  static TestFunction ramp(std::span<const double> grid, double a, double b);
  static TestFunction limit_profile(const RadialProfile& G);
  /// base + eps * direction
  static TestFunction perturbed(const RadialProfile& base, const RadialProfile& direction, double eps,
                                const std::string& label);
  static TestFunction solution(const RadialProfile& u);
};

/// Profile 1 - r on the given grid.
RadialProfile one_minus_r(std::span<const double> grid);

/// Constants {(q/p)^{1/(q-p)}, 0.5, 1, 2}, G when given, ramps r and 1/2 + r,
/// u ± ε(1 - r) for ε ∈ {0.01, 0.1}, and u itself.
std::vector<TestFunction> default_battery(const RadialProfile& u, const ProblemParams& params,
                                          const RadialProfile* G);

struct WeakInequalityReport {
  double worst_slack = 0.0;
  std::string worst_name;
  std::vector<std::pair<std::string, double>> slacks;
};

/// Slack of ∫(|∇u|^p + u^p)/p <= ∫(|∇φ|^p + |φ|^p)/p - ∫u^{q-1}(φ - u) per φ.
WeakInequalityReport weak_inequality_check(const RadialProfile& u, const ProblemParams& params,
                                           std::span<const TestFunction> battery);

/// ∫ |u'|^{p-2}u' φ' + ∫ (u^{p-1} - u^{q-1}) φ (source term dropped for LimitOnly).
double weak_residual(const RadialProfile& u, const ProblemParams& params, const TestFunction& phi,
                     SourceTerm source = SourceTerm::Full);

struct LocalMinRow {
  std::string direction;
  double eps = 0.0;
  double scale = 0.0;
  double distance = 0.0;     // ‖w - 1‖_{W^{1,p}}
  double energy_gap = 0.0;   // I_q(w) - I_q(1)
  bool in_cone = false;      // w non-decreasing, i.e. w ∈ N_q
  std::optional<std::string> error;
};

struct NamedDirection {
  std::string name;
  RadialProfile profile;
};

/// Rows for w = nehari_project(1 + ε direction), marking (with error) rows
/// where ‖w - 1‖ exceeds delta_probe or the projection leaves the pure-power
/// regime. Only in_cone rows are covered by local minimality of 1 on N_q.
std::vector<LocalMinRow> local_min_probe(const ProblemParams& params, const TruncationParams& trunc,
                                         std::span<const NamedDirection> directions,
                                         std::span<const double> eps_list, double delta_probe = 0.5);

// Certificate battery --------------------------------------------------------

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

struct CertificateOptions {
  double tol_neumann = 1e-8;
  double tol_cone = 1e-10;
  double tol_bounds = 1e-8;
  double tol_lyapunov = 1e-8;
  double tol_nehari = 1e-6;
  double tol_residual = 1e-6;
  double tol_slack = 1e-7;
  double holder_exponent = 0.5;
};

struct Certificate {
  std::vector<CheckResult> checks;
  EnergyReport energy;
  bool passed() const;
  const CheckResult* find(const std::string& name) const;
};

/// Number of sign changes of u - 1 across nodes (exact zeros skipped).
int crossings_of_one(const RadialProfile& profile);

/// Full battery for a claimed Neumann solution in the cone.
Certificate certify_solution(const RadialProfile& u, const ProblemParams& params, const TruncationParams& trunc,
                             const RadialProfile* G, const CertificateOptions& options = {});

}  // namespace plap
