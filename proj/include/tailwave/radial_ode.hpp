#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tailwave/model.hpp"

namespace tailwave {

struct State {
  cplx u = 0.0;
  cplx du = 0.0;
};

/// Second-order linear radial ODE  -u'' - a(r) u' + b(r) u = f(r).
struct OdeSystem {
  std::function<cplx(double)> a;
  std::function<cplx(double)> b;
  std::function<cplx(double)> f;  // empty: homogeneous
};

OdeSystem make_system(const ModeCoefficients& coeffs);

struct IntegrateOptions {
  double tol = 1e-10;
  long max_steps = 10'000'000;
  /// Rescale (u, du) when they exceed 1e100 and record the log of the factor.
  bool renormalize = false;
  /// Points the stepper must not step across (coefficient or forcing kinks).
  std::vector<double> breakpoints;
};

/// Far-field connection data u ~ c_minus r^{-lambda^-} + c_plus r^{-lambda^+} (+ c_log r^{-lambda^-} log r).
struct Connection {
  cplx c_minus = 0.0;
  cplx c_plus = 0.0;
  cplx c_log = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  /// Relative disagreement of the estimates at R1 and R2.
  double residual = 0.0;
  bool valid = false;
};

struct RadialSolution {
  std::vector<double> r;
  std::vector<cplx> u;
  std::vector<cplx> du;
  /// Natural log of the factor each (u, du) pair must be multiplied by; empty means zero.
  std::vector<double> log_scale;
  std::optional<Connection> connection;

  std::size_t size() const { return r.size(); }
  std::optional<std::size_t> index_of(double radius, double rel_tol = 1e-12) const;
  double scale(std::size_t i) const { return log_scale.empty() ? 0.0 : log_scale[i]; }
  /// Unscaled value / derivative at grid index i.
  cplx value(std::size_t i) const;
  cplx derivative(std::size_t i) const;
  /// Cubic Hermite interpolation of the unscaled solution.
  State interpolate(double radius) const;
  RadialSolution scaled(cplx factor) const;
};

/// Integrate from r0 to every point of the ascending grid, either outward
/// (r0 <= grid.front()) or inward (r0 >= grid.back()). Dormand-Prince 5(4)
/// with PI step control; throws StepFailure / NonFinite.
RadialSolution integrate(const OdeSystem& sys, State y0, double r0, std::span<const double> grid,
                         const IntegrateOptions& opts = {});

/// Result of integrating the ODE together with the Green's-function quadrature
/// q(r) = q0 + int_{r0}^{r} weight(s) u(s) ds.
struct QuadratureSolution {
  RadialSolution sol;
  std::vector<cplx> q;
};

QuadratureSolution integrate_with_quadrature(const OdeSystem& sys, State y0, double r0,
                                             std::span<const double> grid,
                                             const std::function<cplx(double)>& weight,
                                             cplx q0 = 0.0, const IntegrateOptions& opts = {});

/// Frobenius series at the regular singular point r = 0:
///   u = r^mu sum_k (c_k + d_k log r) r^k.
struct FrobeniusSeries {
  cplx mu = 0.0;
  std::vector<cplx> c;
  std::vector<cplx> d;  // empty unless a log term was forced

  State evaluate(double r) const;
  double tail_estimate(double r) const;
};

/// Homogeneous Frobenius series with exponent mu; throws ResonantExponent if a
/// recursion denominator vanishes.
FrobeniusSeries frobenius_series(const OriginSeries& s, cplx mu, int m);

/// Particular solution for forcing f = sum_k g_k r^{kappa - 2 + k}. A single
/// resonance with the indicial polynomial is absorbed by a log term (the
/// log-augmented variant); the free homogeneous coefficient is set to zero.
FrobeniusSeries frobenius_forced_series(const OriginSeries& s, cplx kappa,
                                        const std::vector<cplx>& g, int m);

State frobenius_start(const OriginSeries& s, cplx mu, int m, double r0);

/// Far-field series u = r^{-lead} sum_k d_k r^{-k} (asymptotic for sigma != 0).
struct AsymptoticSeries {
  cplx lead = 0.0;
  std::vector<cplx> d;

  State evaluate(double r) const;
  double tail_estimate(double r) const;
};

/// Homogeneous far-field solution with exponent lam: lam must be lambda^+- at
/// sigma = 0 or the outgoing exponent (n-1)/2 + S when sigma != 0.
AsymptoticSeries power_series_at_infinity(const FarField& ff, cplx lam, int m);

/// Conormal particular solution at infinity for forcing g0 r^{kappa - 2}, sigma != 0.
AsymptoticSeries forced_series_at_infinity(const FarField& ff, cplx kappa, cplx g0, int m);

/// Evaluate the homogeneous series at R; throws SlowConvergence if the tail exceeds tol.
State power_asymptotic_start(const FarField& ff, cplx lam, int m, double R, double tol);

/// Smallest R >= r_min (doubling) at which the series tail is below tol.
double adaptive_start_radius(const AsymptoticSeries& series, double r_min, double tol,
                             double r_cap = 1e8);

/// W = r^{n-1} e^{2 i sigma r} (u v' - u' v) at grid radius r.
cplx wronskian(const RadialSolution& u, const RadialSolution& v, cplx sigma, int n, double r);
cplx wronskian(State u, State v, cplx sigma, int n, double r);

/// Connection coefficients onto r^{-lam_minus}, r^{-lam_plus} from (u, u') at r.
std::pair<cplx, cplx> connection_at(State y, double r, cplx lam_minus, cplx lam_plus);

/// Two-radius connection fit with relative agreement tolerance fit_tol.
Connection fit_connection(State y1, double R1, State y2, double R2, cplx lam_minus, cplx lam_plus,
                          double fit_tol = 1e-6);

/// Least-squares fit of values u(r_i) onto r^{-e_j} (optionally times log r).
struct PowerBasis {
  cplx exponent;
  bool log = false;
};
std::vector<cplx> fit_power_basis(std::span<const double> r, std::span<const cplx> u,
                                  std::span<const PowerBasis> basis);

std::vector<double> geometric_grid(double r0, double r1, double ratio = 1.02);
std::vector<double> uniform_grid(double r0, double r1, double h);
/// Sorted union with duplicates (to 1e-12 relative) removed.
std::vector<double> merge_grids(std::vector<double> a, const std::vector<double>& b);

/// Finite-difference weights (Fornberg) for the m-th derivative at x0.
std::vector<double> fd_weights(double x0, std::span<const double> x, int m);

/// Sup over interior grid points of weight(r) |-u'' - a u' + b u - f|, with u''
/// obtained by differentiating the stored u' with a 7-point stencil. Stencils
/// straddling a breakpoint are skipped.
double ode_residual(const OdeSystem& sys, const RadialSolution& sol,
                    const std::vector<double>& breakpoints,
                    const std::function<double(double)>& weight = {}, double r_lo = 0.0,
                    double r_hi = 1e300);

}  // namespace tailwave
