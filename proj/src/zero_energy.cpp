#include "tailwave/zero_energy.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "tailwave/errors.hpp"
#include "tailwave/indicial.hpp"

namespace tailwave {

namespace {

constexpr int kSeriesTerms = 24;

struct Branches {
  cplx lam_minus, lam_plus;
};

Branches far_branches(const ModeModel& model, int ell) {
  const cplx nu = nu_ell(model.n, model.alpha, ell);
  const double h = 0.5 * double(model.n - 2);
  return {h - nu, h + nu};
}

double matching_radius(const ModeModel& model, const ZeroEnergyOptions& opts) {
  return opts.R > 0.0 ? std::max(opts.R, 2.0) : std::max(model.r_match, 4.0);
}

bool resonant(const Connection& c, double res_tol) {
  return std::abs(c.c_minus) <= res_tol * std::abs(c.c_plus);
}

}  // namespace

double regular_start_radius(const ModeCoefficients& coeffs, double r_max) {
  const auto s = coeffs.origin_series(kSeriesTerms);
  const auto series = frobenius_series(s, double(coeffs.ell()), kSeriesTerms);
  double r0 = std::min(r_max, 0.5 * s.radius);
  while (series.tail_estimate(r0) > 1e-15 && r0 > 1e-8) r0 *= 0.5;
  return r0;
}

RadialSolution regular_branch(const ModeCoefficients& coeffs, std::span<const double> grid, double tol,
                              bool renormalize) {
  const auto s = coeffs.origin_series(kSeriesTerms);
  const auto series = frobenius_series(s, double(coeffs.ell()), kSeriesTerms);
  const double r0 = std::min(grid.front(), regular_start_radius(coeffs));
  IntegrateOptions opts;
  opts.tol = tol;
  opts.renormalize = renormalize;
  opts.breakpoints = model_breakpoints(coeffs.model());
  return integrate(make_system(coeffs), series.evaluate(r0), r0, grid, opts);
}

Connection zero_energy_connection(const ModeModel& model, int ell, const ZeroEnergyOptions& opts) {
  const ModeCoefficients coeffs(model, ell, 0.0);
  const double R = matching_radius(model, opts);
  const std::vector<double> grid{R, 2.0 * R};
  const auto sol = regular_branch(coeffs, grid, opts.tol);
  const auto br = far_branches(model, ell);
  return fit_connection({sol.u[0], sol.du[0]}, R, {sol.u[1], sol.du[1]}, 2.0 * R, br.lam_minus,
                        br.lam_plus, opts.fit_tol);
}

cplx resonance_indicator(const ModeModel& model, int ell, const ZeroEnergyOptions& opts) {
  const auto c = zero_energy_connection(model, ell, opts);
  if (!c.valid)
    throw Error(ErrorCode::FitInvalid,
                "connection estimates at R and 2R disagree (relative " + std::to_string(c.residual) + ")");
  return c.c_minus;
}

std::vector<double> zero_energy_grid(const ModeModel& model, const RadialProfile& f) {
  double inner = std::max(model.r_match, 2.0);
  const double end = f.support_end();
  if (std::isfinite(end)) inner = std::max(inner, end);
  const double R_end = std::max(4.0 * inner, 50.0);
  auto grid = geometric_grid(1e-3, R_end, 1.02);
  return merge_grids(grid, uniform_grid(0.5, inner, 0.001));
}

RadialSolution solve_zero_energy(const ModeModel& model, int ell, const RadialProfile& f,
                                 const ZeroEnergyOptions& opts) {
  const auto grid = zero_energy_grid(model, f);
  return solve_zero_energy(model, ell, f, grid, opts);
}

RadialSolution solve_zero_energy(const ModeModel& model, int ell, const RadialProfile& f,
                                 std::span<const double> grid, const ZeroEnergyOptions& opts) {
  const auto conn = zero_energy_connection(model, ell, opts);
  if (resonant(conn, opts.res_tol))
    throw Error(ErrorCode::ResonanceDetected, "zero-energy resonance in mode " + std::to_string(ell));
  const auto br = far_branches(model, ell);
  const int n = model.n;

  RadialSolution out;
  out.r.assign(grid.begin(), grid.end());
  out.u.assign(grid.size(), 0.0);
  out.du.assign(grid.size(), 0.0);
  if (f.is_zero()) return out;

  const auto tail = f.power_law_tail();
  if (tail && !(tail->second.real() < -br.lam_minus.real() - 2.0))
    throw Error(ErrorCode::InvalidModel, "forcing tail decays too slowly for the Green's function to converge");

  const ModeCoefficients coeffs(model, ell, 0.0);
  const OdeSystem sys = make_system(coeffs);
  auto weight = [&](double r) { return std::pow(r, double(n - 1)) * f(r); };
  IntegrateOptions io;
  io.tol = opts.tol;
  io.breakpoints = merge_grids(model_breakpoints(model), f.breakpoints());

  // Regular branch with I1(r) = int_0^r u_reg r^{n-1} f.
  const auto s = coeffs.origin_series(kSeriesTerms);
  const auto series = frobenius_series(s, double(ell), kSeriesTerms);
  const double r0 = std::min(grid.front(), regular_start_radius(coeffs));
  const State y_reg = series.evaluate(r0);
  const cplx q_origin = y_reg.u * weight(r0) * r0 / double(n + ell);
  const auto reg = integrate_with_quadrature(sys, y_reg, r0, grid, weight, q_origin, io);

  // Decaying branch r^{-lambda^+}, exact beyond r_match; inward with int_{R}^{r}.
  const double R = std::max({grid.back(), model.r_match, 2.0});
  const cplx uR = std::exp(-br.lam_plus * std::log(R));
  const auto dec = integrate_with_quadrature(sys, {uR, -br.lam_plus * uR / R}, R, grid, weight, 0.0, io);
  cplx tail_integral = 0.0;
  if (tail) {
    const cplx e = -br.lam_plus + double(n - 1) + tail->second;
    tail_integral = -tail->first * std::exp((e + 1.0) * std::log(R)) / (e + 1.0);
  }

  const std::size_t mid = grid.size() / 2;
  const cplx W = wronskian(State{reg.sol.u[mid], reg.sol.du[mid]}, State{dec.sol.u[mid], dec.sol.du[mid]},
                           0.0, n, grid[mid]);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx I1 = reg.q[i];
    const cplx I2 = tail_integral - dec.q[i];
    out.u[i] = -(dec.sol.u[i] * I1 + reg.sol.u[i] * I2) / W;
    out.du[i] = -(dec.sol.du[i] * I1 + reg.sol.du[i] * I2) / W;
  }

  const double end = f.support_end();
  if (std::isfinite(end)) {
    const double R1 = std::max({end, model.r_match, 2.0});
    const auto i1 = std::lower_bound(grid.begin(), grid.end(), R1) - grid.begin();
    const std::size_t i2 = grid.size() - 1;
    if (std::size_t(i1) < i2 && grid[i2] >= 2.0 * R1 * (1 - 1e-12)) {
      out.connection = fit_connection({out.u[i1], out.du[i1]}, grid[i1], {out.u[i2], out.du[i2]}, grid[i2],
                                      br.lam_minus, br.lam_plus, opts.fit_tol);
    }
  }

  const double wexp = br.lam_minus.real() + 2.0;
  auto w = [wexp](double r) { return std::pow(1.0 + r, wexp); };
  double fnorm = 0.0;
  for (double r : grid) fnorm = std::max(fnorm, w(r) * std::abs(f(r)));
  OdeSystem forced = sys;
  forced.f = [&f](double r) { return f(r); };
  const double resid = ode_residual(forced, out, io.breakpoints, w);
  if (resid > opts.resid_tol * fnorm)
    throw Error(ErrorCode::ResidualTooLarge, "zero-energy residual " + std::to_string(resid) +
                                                 " exceeds " + std::to_string(opts.resid_tol * fnorm));
  return out;
}

RadialSolution large_zero_state(const ModeModel& model, double r_max, const ZeroEnergyOptions& opts) {
  const auto conn = zero_energy_connection(model, 0, opts);
  if (resonant(conn, opts.res_tol))
    throw Error(ErrorCode::ResonanceDetected, "mode 0 has a zero-energy resonance");
  const ModeCoefficients coeffs(model, 0, 0.0);
  const double r0 = regular_start_radius(coeffs);
  auto grid = geometric_grid(r0, r_max, 1.01);
  auto sol = regular_branch(coeffs, grid, opts.tol).scaled(1.0 / conn.c_minus);
  Connection c = conn;
  c.c_plus = conn.c_plus / conn.c_minus;
  c.c_minus = 1.0;
  sol.connection = c;
  return sol;
}

ResonanceCrossing resonance_crossing(const ModeModel& base, int ell, const std::string& family, double c_lo,
                                     double c_hi, const ZeroEnergyOptions& opts, double c_tol) {
  if (family != "gauss" && family != "yukawa")
    throw Error(ErrorCode::ConfigInvalid, "unknown resonance family '" + family + "'");
  if (!(c_hi > c_lo)) throw Error(ErrorCode::ConfigInvalid, "resonance bracket must satisfy c_lo < c_hi");
  ResonanceCrossing out;
  auto indicator = [&](double c) {
    ModeModel m = base;
    m.potential = family == "gauss" ? RadialProfile::gauss(-c, 1.0) : RadialProfile::yukawa(-c, 1.0);
    m.r_match = 0.0;
    m.finalize();
    ++out.evaluations;
    return resonance_indicator(m, ell, opts).real();
  };
  out.c_minus_lo = indicator(c_lo);
  out.c_minus_hi = indicator(c_hi);
  if (out.c_minus_lo * out.c_minus_hi > 0.0)
    throw Error(ErrorCode::FitInvalid, "c^- does not change sign on the bracket");
  std::uintmax_t iters = 200;
  auto tol = [c_tol](double a, double b) { return std::abs(b - a) <= c_tol; };
  const auto [a, b] = boost::math::tools::toms748_solve(indicator, c_lo, c_hi, out.c_minus_lo, out.c_minus_hi, tol, iters);
  out.c_star = 0.5 * (a + b);
  return out;
}

}  // namespace tailwave
