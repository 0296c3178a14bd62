#pragma once

// q -> ∞ behavior: the Dirichlet limit profile G of the low-energy branch,
// q-sweeps of both non-constant branches, and the trend diagnostics built on them.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plap/ivp.hpp"
#include "plap/problem.hpp"
#include "plap/shooting.hpp"

namespace plap {

struct LimitProfile {
  RadialProfile profile;     // G on the report grid, G(1) = 1
  double dirichlet_value = 1.0;
  double norm_p = 0.0;       // ‖G‖^p_{W^{1,p}}
  double raw_endpoint = 0.0; // G̃(1) for the trajectory started at G̃(0) = 1
};

/// Integrates the source-free system from u(0) = 1 and rescales by the
/// endpoint value (the limit equation is positively 1-homogeneous).
LimitProfile compute_G(const ProblemParams& params, const IntegratorControls& controls = {});

/// Residual ∫|G'|^{p-2}G'φ' + ∫G^{p-1}φ for φ vanishing at r = 1 and the
/// largest |residual| over the default interior battery.
double limit_residual_worst(const LimitProfile& G, const ProblemParams& params);

struct SweepRecord {
  double q = 0.0;
  std::optional<double> d_u, d_v;
  std::optional<double> I_u, I_v;
  double I_const = 0.0;
  std::optional<double> sup_dist_v;   // ‖v_q - 1‖_∞
  std::optional<double> sup_dist_u;   // ‖u_q - G‖_∞
  std::optional<double> w1p_dist_v;   // ‖v_q - 1‖_{W^{1,p}}
  std::optional<double> w1p_dist_u;   // ‖u_q - G‖_{W^{1,p}}
  std::optional<double> holder_dist_v;  // [v_q - 1]_{C^{0,1/2}}
  std::optional<double> energy_ratio;   // p I_q(v_q) / |B|
  std::optional<double> q_term_v;       // ∫ v_q^q / q
  std::size_t accepted_roots = 0;
  std::size_t high_energy_roots = 0;
  std::optional<std::string> failure;
};

struct SweepEntry {
  SweepRecord record;
  std::optional<RadialProfile> u_q;
  std::optional<RadialProfile> v_q;
};

struct SweepOptions {
  ShootingOptions shooting;
  /// Concurrent q values; each find_solutions then runs single-threaded.
  std::size_t workers = 0;
};

/// One entry per q in q_list order. Throws std::invalid_argument unless q_list is
/// strictly increasing with every q > p.
std::vector<SweepEntry> sweep(const ProblemParams& base, std::span<const double> q_list, const LimitProfile& G,
                              const SweepOptions& options = {});

struct DerivativeRow {
  double q = 0.0;
  std::optional<double> u_dev;  // sup_{0<r<=R} |u_q' - G'|
  std::optional<double> v_dev;  // sup_{0<r<=R} |v_q'|
};

std::vector<DerivativeRow> derivative_convergence_check(std::span<const SweepEntry> entries, const LimitProfile& G,
                                                        double R);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual in log space
  std::size_t used = 0;
};

/// Least-squares slope of log(value) against log(q); non-positive values are skipped.
/// Throws std::invalid_argument with fewer than three usable rows.
RateFit rate_fit(std::span<const std::pair<double, double>> series);

/// True when every consecutive pair strictly decreases and no entry is missing.
bool strictly_decreasing(std::span<const std::optional<double>> series);

}  // namespace plap
