#pragma once

// Shooting on u(0) = d ∈ (0, 1): the terminal flux w(1; d) vanishes exactly at
// Neumann solutions. Sign changes on a scan grid are refined by bisection,
// re-integrated at tight tolerance, validated against the cone and
// classified by energy against the constant solution 1.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "plap/functionals.hpp"
#include "plap/ivp.hpp"
#include "plap/problem.hpp"

namespace plap {

/// Miss value reported for trajectories that reach u_cap before r = 1.
inline constexpr double kBlowUpMiss = 1e300;

struct ShootingOutcome {
  double d = 0.0;
  double miss = 0.0;  // w(1; d), kBlowUpMiss, or NaN on an exhausted step budget
  IvpResult result;

  bool bracketable() const { return !std::isnan(miss); }
};

ShootingOutcome shoot(double d, const ProblemParams& params, const IntegratorControls& controls);

/// w(1; d); +kBlowUpMiss on blow-up, quiet NaN when the step budget runs out.
double miss(double d, const ProblemParams& params, const IntegratorControls& controls);

struct ScanSpec {
  std::size_t log_points = 512;
  double d_min = 1e-4;
  /// Largest scanned d is 1 - min_gap.
  double min_gap = 1e-8;
  /// Ladder 1 - spread 2^{-k / per_octave} accumulating at d = 1.
  double ladder_spread = 0.5;
  std::size_t ladder_per_octave = 4;
  /// Roots with |d - 1| below this radius are identified with the constant solution.
  double exclusion_radius = 1e-9;
  double d_tol = 1e-13;

  /// Sorted, de-duplicated scan abscissae in (0, 1).
  std::vector<double> points() const;
};

enum class RootLabel { LowEnergy, HighEnergy, Ambiguous, Rejected };

const char* to_string(RootLabel label);

struct ShootingOptions {
  ScanSpec scan;
  /// Controls for the scan; bisection and the final profiles use controls.tightened().
  IntegratorControls controls{.eps0 = 1e-6, .rel_tol = 1e-9, .abs_tol = 1e-12};
  std::optional<TruncationParams> trunc;
  std::size_t workers = 0;
  double tol_cone = 1e-10;
  double tol_neumann = 1e-8;
  /// Classification margin, as a multiple of the energy quadrature error estimate.
  double margin_factor = 10.0;
};

struct RootInfo {
  double d = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  ShootingOutcome outcome;  // tight re-integration at d
  EnergyReport energy;
  double energy_gap = 0.0;  // I_q(u) - I_q(1)
  double margin_tol = 0.0;
  RootLabel label = RootLabel::Ambiguous;
  std::optional<std::string> rejection;

  bool accepted() const { return !rejection.has_value(); }
  const RadialProfile& profile() const { return outcome.result.profile; }
};

struct SolutionSet {
  double constant_energy = 0.0;
  std::vector<RootInfo> roots;  // sorted by d
  std::vector<double> scan_d;
  std::vector<double> scan_miss;
  std::size_t duplicates_collapsed = 0;

  std::vector<const RootInfo*> accepted() const;
  /// Lowest-energy accepted LowEnergy root.
  const RootInfo* low_energy() const;
  /// Accepted HighEnergy root closest to d = 1.
  const RootInfo* high_energy() const;
  std::size_t count(RootLabel label) const;
};

/// Label of a profile by its energy against I_q(1) with the given margin.
RootLabel classify(const RadialProfile& profile, const ProblemParams& params, const TruncationParams& trunc,
                   double margin_tol);
/// Same, with margin_tol = margin_factor * quadrature error estimate.
RootLabel classify(const RadialProfile& profile, const ProblemParams& params, const TruncationParams& trunc);

/// Bisection on a sign change of miss over [lo, hi] until hi - lo <= d_tol.
double refine_root(double lo, double hi, const ProblemParams& params, const IntegratorControls& controls,
                   double d_tol);

SolutionSet find_solutions(const ProblemParams& params, const ShootingOptions& options = {});

}  // namespace plap
