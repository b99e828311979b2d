#pragma once

#include <span>
#include <vector>

#include "tailwave/model.hpp"
#include "tailwave/radial_ode.hpp"

namespace tailwave {

struct SpectralOptions {
  double tol = 1e-10;
  int series_terms = 12;
  double stability_tol = 1e-6;
  double resid_tol = 1e-8;
  bool check_residual = true;
};

/// Outgoing solution u = r^{-(n-1)/2-S}(1 + O(1/r)), integrated inward from an
/// adaptive start radius. Stored in scaled form (see RadialSolution::log_scale).
RadialSolution outgoing_solution(const ModeModel& model, int ell, cplx sigma, std::span<const double> grid,
                                 const SpectralOptions& opts = {});
RadialSolution outgoing_solution(const ModeModel& model, int ell, cplx sigma,
                                 const SpectralOptions& opts = {});

/// Regular solution u ~ r^l at the origin, integrated outward.
RadialSolution regular_solution(const ModeModel& model, int ell, cplx sigma, std::span<const double> grid,
                                const SpectralOptions& opts = {});
RadialSolution regular_solution(const ModeModel& model, int ell, cplx sigma,
                                const SpectralOptions& opts = {});

/// Start radius of the outgoing series for the given sigma.
double outgoing_start_radius(const ModeModel& model, int ell, cplx sigma, const SpectralOptions& opts = {});

struct WronskianValue {
  cplx W = 0.0;
  /// Max relative deviation of W across the sample radii.
  double drift = 0.0;
};

WronskianValue wronskian_sigma(const ModeModel& model, int ell, cplx sigma, const SpectralOptions& opts = {});

struct StabilityRow {
  int ell = 0;
  cplx sigma = 0.0;
  cplx W = 0.0;
  double drift = 0.0;
};

struct StabilityReport {
  std::vector<StabilityRow> table;
  std::vector<double> min_abs_W;  // per ell
  std::vector<cplx> argmin;       // per ell
  double min_abs = 0.0;
  bool stable = true;
};

/// Rectangular sigma grid re in [lo, hi] (n points) x im in [ilo, ihi] (m points).
std::vector<cplx> sigma_grid(double lo, double hi, int n, double ilo = 0.0, double ihi = 0.0, int m = 1);

/// Parallel over (ell, sigma); rows are ordered by ell, then by grid index.
StabilityReport mode_stability_scan(const ModeModel& model, int ell_max, std::span<const cplx> sigmas,
                                    const SpectralOptions& opts = {});

/// Output grid used by apply_resolvent (geometric plus a fine uniform core).
std::vector<double> resolvent_grid(const ModeModel& model, cplx sigma, const RadialProfile& f);

/// Outgoing Green's-function solution of P(sigma) u = f.
RadialSolution apply_resolvent(const ModeModel& model, int ell, cplx sigma, const RadialProfile& f,
                               const SpectralOptions& opts = {});
RadialSolution apply_resolvent(const ModeModel& model, int ell, cplx sigma, const RadialProfile& f,
                               std::span<const double> grid, const SpectralOptions& opts = {});

struct NormRow {
  cplx sigma = 0.0;
  double n_lo = 0.0;
  double n_hi = 0.0;
};

struct NormScan {
  std::vector<NormRow> rows;
  /// max / min over the scan (1 for a flat scan, 0 if all norms vanish).
  double lo_ratio = 0.0;
  double hi_ratio = 0.0;
  bool lo_monotone = false;
  bool hi_monotone = false;
};

/// N_lo = sup_r (r / (1 + |sigma| r))^{Re lambda^- + eps} |u|,  N_hi = |sigma| sup_{r <= R0} |u|.
NormScan resolvent_norm_scan(const ModeModel& model, int ell, const RadialProfile& f,
                             std::span<const cplx> sigmas, double eps = 0.1, double R0 = 10.0,
                             const SpectralOptions& opts = {});

}  // namespace tailwave
