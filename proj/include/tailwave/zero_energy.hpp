#pragma once

#include <span>
#include <string>
#include <vector>

#include "tailwave/model.hpp"
#include "tailwave/radial_ode.hpp"

namespace tailwave {

struct ZeroEnergyOptions {
  double tol = 1e-10;
  double fit_tol = 1e-6;
  /// Resonance threshold on |c^-| relative to |c^+| (or 1 if c^+ vanishes).
  double res_tol = 1e-8;
  double resid_tol = 1e-7;
  /// First matching radius; 0 selects max(r_match, 4). The second is 2R.
  double R = 0.0;
};

/// Solution regular at the origin (u ~ r^l, u / r^l -> 1) of the mode operator
/// with the given coefficients, on an ascending grid.
RadialSolution regular_branch(const ModeCoefficients& coeffs, std::span<const double> grid,
                              double tol = 1e-10, bool renormalize = false);

/// Frobenius start radius with series tail below 1e-15 (at most r_max).
double regular_start_radius(const ModeCoefficients& coeffs, double r_max = 0.1);

/// Connection of the regular zero-energy solution onto (r^{-lambda^-}, r^{-lambda^+}).
Connection zero_energy_connection(const ModeModel& model, int ell, const ZeroEnergyOptions& opts = {});

/// c^- of the regular zero-energy solution; throws FitInvalid if the two-radius
/// estimates disagree.
cplx resonance_indicator(const ModeModel& model, int ell, const ZeroEnergyOptions& opts = {});

/// u with P(0) u = f, regular at 0 and decaying like r^{-lambda^+} (plus the
/// particular tail of f). Output grid: geometric, refined on the forcing support.
RadialSolution solve_zero_energy(const ModeModel& model, int ell, const RadialProfile& f,
                                 const ZeroEnergyOptions& opts = {});

/// Same on a caller-supplied ascending grid (first point > 0).
RadialSolution solve_zero_energy(const ModeModel& model, int ell, const RadialProfile& f,
                                 std::span<const double> grid, const ZeroEnergyOptions& opts = {});

/// Default output grid for solve_zero_energy.
std::vector<double> zero_energy_grid(const ModeModel& model, const RadialProfile& f);

/// a_T = u_reg / c^- for mode 0, so that r^{lambda^-} a_T -> 1.
RadialSolution large_zero_state(const ModeModel& model, double r_max = 100.0,
                                const ZeroEnergyOptions& opts = {});

struct ResonanceCrossing {
  double c_star = 0.0;
  double c_minus_lo = 0.0, c_minus_hi = 0.0;  // Re c^- at the bracket ends
  int evaluations = 0;
};

/// Coupling c* at which Re c^- of mode `ell` vanishes for V = -c * family(r),
/// family "gauss" (exp(-r^2)) or "yukawa" (exp(-r)); c* must be bracketed by [c_lo, c_hi].
ResonanceCrossing resonance_crossing(const ModeModel& base, int ell, const std::string& family, double c_lo,
                                     double c_hi, const ZeroEnergyOptions& opts = {}, double c_tol = 1e-9);

}  // namespace tailwave
