#pragma once

// Radial initial-value problem in flux form
//
//   u' = signed_power(w / r^{N-1}, 1/(p-1))
//   w' = r^{N-1} (u^{p-1} - u^{q-1})        (Full)
//   w' = r^{N-1}  u^{p-1}                   (LimitOnly, the q -> ∞ Dirichlet limit)
//
// started from u(0) = d, w(0) = 0 through a local expansion at r = eps0, and
// advanced with an embedded Dormand-Prince 5(4) pair. Samples are taken from
// the continuous extension on a uniform report grid of M + 1 nodes.

#include <cstddef>
#include <vector>

#include "plap/problem.hpp"

namespace plap {

enum class SourceTerm { Full, LimitOnly };

struct IvpState {
  double r = 0.0;
  double u = 0.0;
  double w = 0.0;
};

struct IntegratorControls {
  double eps0 = 1e-6;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Blow-up threshold; <= 0 selects 10 max(s0, (q/p)^{1/(q-p)}).
  double u_cap = 0.0;
  std::size_t max_steps = 1'000'000;
  std::size_t report_intervals = 2048;

  /// Same controls with tolerances tightened for root re-integration.
  IntegratorControls tightened() const;
};

/// u_cap, resolved against the default truncation when left unset.
double resolved_u_cap(const IntegratorControls& controls, const ProblemParams& params);

enum class IvpStatus { ReachedOne, BlewUp, StepBudgetExhausted };

const char* to_string(IvpStatus status);

struct IvpResult {
  IvpStatus status = IvpStatus::ReachedOne;
  /// Report-grid samples up to the terminal radius.
  RadialProfile profile;
  IvpState terminal;
  /// Radius where u first reached u_cap (BlewUp only).
  double blowup_radius = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Right-hand side of the radial system.
struct RadialSystem {
  int N;
  double p;
  double q;
  SourceTerm source;

  RadialSystem(const ProblemParams& params, SourceTerm source_term)
      : N(params.N()), p(params.p()), q(params.q()), source(source_term) {}

  double source_value(double u) const;
  double derivative_from_flux(double r, double w) const;
  void rhs(double r, double u, double w, double& du, double& dw) const;
};

/// Local expansion of the regular solution at radius eps (defaults to controls.eps0).
IvpState series_start(double d, const ProblemParams& params, const IntegratorControls& controls,
                      SourceTerm source = SourceTerm::Full);
IvpState series_state(double d, double r, const ProblemParams& params,
                      SourceTerm source = SourceTerm::Full);

/// Integrates from u(0) = d to r = 1; throws std::invalid_argument when d <= 0.
IvpResult integrate(double d, const ProblemParams& params, const IntegratorControls& controls,
                    SourceTerm source = SourceTerm::Full);

struct OrderProbeResult {
  double order = 0.0;
  std::vector<double> tolerances;
  std::vector<double> errors;
  std::vector<std::size_t> steps;
  bool degenerate = false;
};

/// Empirical convergence order of integrate(): runs at base_tol, base_tol/10,
/// base_tol/100 against a tight reference, measuring the sup error of u and
/// w over report nodes with r >= r_min, and fits log(error) against
/// log(accepted steps). A trajectory with zero error everywhere (d = 1) is
/// reported as degenerate with order 0.
OrderProbeResult convergence_order_probe(const ProblemParams& params, const IntegratorControls& controls,
                                         double d, double r_min, SourceTerm source = SourceTerm::Full,
                                         double base_tol = 1e-6);

}  // namespace plap
