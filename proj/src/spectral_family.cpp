#include "tailwave/spectral_family.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <omp.h>

#include "tailwave/errors.hpp"
#include "tailwave/indicial.hpp"
#include "tailwave/zero_energy.hpp"

namespace tailwave {

namespace {

void require_upper_half(cplx sigma) {
  if (sigma == cplx(0.0) || sigma.imag() < 0.0)
    throw Error(ErrorCode::InvalidModel, "spectral parameter must satisfy sigma != 0, Im sigma >= 0");
}

AsymptoticSeries outgoing_series(const ModeCoefficients& coeffs, int m) {
  const FarField ff = coeffs.far_field();
  return power_series_at_infinity(ff, 0.5 * double(ff.n - 1) + ff.S, m);
}

double inner_radius(const ModeModel& model) { return std::max(model.r_match, 2.0); }

}  // namespace

double outgoing_start_radius(const ModeModel& model, int ell, cplx sigma, const SpectralOptions& opts) {
  require_upper_half(sigma);
  const ModeCoefficients coeffs(model, ell, sigma);
  return adaptive_start_radius(outgoing_series(coeffs, opts.series_terms), inner_radius(model), opts.tol);
}

RadialSolution outgoing_solution(const ModeModel& model, int ell, cplx sigma, std::span<const double> grid,
                                 const SpectralOptions& opts) {
  require_upper_half(sigma);
  const ModeCoefficients coeffs(model, ell, sigma);
  const auto series = outgoing_series(coeffs, opts.series_terms);
  const double R = std::max(adaptive_start_radius(series, inner_radius(model), opts.tol), grid.back());
  IntegrateOptions io;
  io.tol = opts.tol;
  io.renormalize = true;
  io.breakpoints = model_breakpoints(model);
  return integrate(make_system(coeffs), series.evaluate(R), R, grid, io);
}

RadialSolution outgoing_solution(const ModeModel& model, int ell, cplx sigma, const SpectralOptions& opts) {
  const double R = outgoing_start_radius(model, ell, sigma, opts);
  const auto grid = geometric_grid(1e-2, R, 1.02);
  return outgoing_solution(model, ell, sigma, grid, opts);
}

RadialSolution regular_solution(const ModeModel& model, int ell, cplx sigma, std::span<const double> grid,
                                const SpectralOptions& opts) {
  return regular_branch(ModeCoefficients(model, ell, sigma), grid, opts.tol, true);
}

RadialSolution regular_solution(const ModeModel& model, int ell, cplx sigma, const SpectralOptions& opts) {
  const auto grid = geometric_grid(1e-2, std::max(4.0 * model.r_match, 20.0), 1.02);
  return regular_solution(model, ell, sigma, grid, opts);
}

WronskianValue wronskian_sigma(const ModeModel& model, int ell, cplx sigma, const SpectralOptions& opts) {
  const double rw = inner_radius(model);
  const std::vector<double> grid{0.5, 1.0, rw, 2.0 * rw};
  const auto reg = regular_solution(model, ell, sigma, grid, opts);
  const auto out = outgoing_solution(model, ell, sigma, grid, opts);
  WronskianValue v;
  v.W = wronskian(reg, out, sigma, model.n, rw);
  const double scale = std::max(std::abs(v.W), 1e-300);
  for (double r : grid) v.drift = std::max(v.drift, std::abs(wronskian(reg, out, sigma, model.n, r) - v.W) / scale);
  return v;
}

std::vector<cplx> sigma_grid(double lo, double hi, int n, double ilo, double ihi, int m) {
  std::vector<cplx> out;
  for (int j = 0; j < std::max(m, 1); ++j) {
    const double im = m > 1 ? ilo + (ihi - ilo) * double(j) / double(m - 1) : ilo;
    for (int i = 0; i < std::max(n, 1); ++i) {
      const double re = n > 1 ? lo + (hi - lo) * double(i) / double(n - 1) : lo;
      out.emplace_back(re, im);
    }
  }
  return out;
}

StabilityReport mode_stability_scan(const ModeModel& model, int ell_max, std::span<const cplx> sigmas,
                                    const SpectralOptions& opts) {
  const std::size_t ns = sigmas.size();
  const std::size_t total = std::size_t(ell_max + 1) * ns;
  StabilityReport rep;
  rep.table.resize(total);
  std::vector<std::exception_ptr> errors(total);
#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < long(total); ++t) {
    const int ell = int(std::size_t(t) / ns);
    const cplx sigma = sigmas[std::size_t(t) % ns];
    try {
      const auto w = wronskian_sigma(model, ell, sigma, opts);
      rep.table[std::size_t(t)] = {ell, sigma, w.W, w.drift};
    } catch (...) {
      errors[std::size_t(t)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  rep.min_abs_W.assign(std::size_t(ell_max + 1), INFINITY);
  rep.argmin.assign(std::size_t(ell_max + 1), 0.0);
  rep.min_abs = INFINITY;
  for (const auto& row : rep.table) {
    const double a = std::abs(row.W);
    if (a < rep.min_abs_W[std::size_t(row.ell)]) {
      rep.min_abs_W[std::size_t(row.ell)] = a;
      rep.argmin[std::size_t(row.ell)] = row.sigma;
    }
    rep.min_abs = std::min(rep.min_abs, a);
  }
  rep.stable = rep.min_abs > opts.stability_tol;
  return rep;
}

std::vector<double> resolvent_grid(const ModeModel& model, cplx sigma, const RadialProfile& f) {
  double inner = inner_radius(model);
  const double end = f.support_end();
  if (std::isfinite(end)) inner = std::max(inner, end);
  const double s = std::abs(sigma);
  const double R_end = std::max(4.0 * inner, std::min(20.0 / s, 1e5));
  const double h = std::min(0.001, 0.02 / s);
  return merge_grids(geometric_grid(1e-3, R_end, 1.02), uniform_grid(0.01, inner, h));
}

RadialSolution apply_resolvent(const ModeModel& model, int ell, cplx sigma, const RadialProfile& f,
                               const SpectralOptions& opts) {
  const auto grid = resolvent_grid(model, sigma, f);
  return apply_resolvent(model, ell, sigma, f, grid, opts);
}

RadialSolution apply_resolvent(const ModeModel& model, int ell, cplx sigma, const RadialProfile& f,
                               std::span<const double> grid, const SpectralOptions& opts) {
  require_upper_half(sigma);
  RadialSolution out;
  out.r.assign(grid.begin(), grid.end());
  out.u.assign(grid.size(), 0.0);
  out.du.assign(grid.size(), 0.0);
  if (f.is_zero()) return out;

  const int n = model.n;
  const ModeCoefficients coeffs(model, ell, sigma);
  const OdeSystem sys = make_system(coeffs);
  const cplx two_i_sigma = 2.0 * cplx(0, 1) * sigma;
  auto weight = [&](double r) { return std::exp(double(n - 1) * std::log(r) + two_i_sigma * r) * f(r); };
  IntegrateOptions io;
  io.tol = opts.tol;
  io.breakpoints = merge_grids(model_breakpoints(model), f.breakpoints());

  const auto s = coeffs.origin_series(24);
  const auto fro = frobenius_series(s, double(ell), 24);
  const double r0 = std::min(grid.front(), regular_start_radius(coeffs));
  const State y_reg = fro.evaluate(r0);
  const cplx q_origin = y_reg.u * weight(r0) * r0 / double(n + ell);
  const auto reg = integrate_with_quadrature(sys, y_reg, r0, grid, weight, q_origin, io);

  const auto series = outgoing_series(coeffs, opts.series_terms);
  const double R = std::max(adaptive_start_radius(series, inner_radius(model), opts.tol), grid.back());
  const auto outg = integrate_with_quadrature(sys, series.evaluate(R), R, grid, weight, 0.0, io);

  const std::size_t mid = grid.size() / 2;
  const cplx W = wronskian(State{reg.sol.u[mid], reg.sol.du[mid]}, State{outg.sol.u[mid], outg.sol.du[mid]},
                           sigma, n, grid[mid]);
  if (std::abs(W) <= opts.stability_tol)
    throw Error(ErrorCode::ModeUnstable, "Wronskian below stability tolerance");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx I1 = reg.q[i];
    const cplx I2 = -outg.q[i];
    out.u[i] = -(outg.sol.u[i] * I1 + reg.sol.u[i] * I2) / W;
    out.du[i] = -(outg.sol.du[i] * I1 + reg.sol.du[i] * I2) / W;
  }

  if (opts.check_residual) {
    double fnorm = 0.0;
    for (double r : grid) fnorm = std::max(fnorm, std::abs(f(r)));
    OdeSystem forced = sys;
    forced.f = [&f](double r) { return f(r); };
    const double resid = ode_residual(forced, out, io.breakpoints);
    if (resid > opts.resid_tol * fnorm)
      throw Error(ErrorCode::ResidualTooLarge,
                  "resolvent residual " + std::to_string(resid) + " exceeds " + std::to_string(opts.resid_tol * fnorm));
  }
  return out;
}

NormScan resolvent_norm_scan(const ModeModel& model, int ell, const RadialProfile& f,
                             std::span<const cplx> sigmas, double eps, double R0, const SpectralOptions& opts) {
  NormScan scan;
  scan.rows.resize(sigmas.size());
  const double p = nu_ell(model.n, model.alpha, ell).real() * -1.0 + 0.5 * double(model.n - 2) + eps;
  std::vector<std::exception_ptr> errors(sigmas.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < long(sigmas.size()); ++i) {
    const cplx sigma = sigmas[std::size_t(i)];
    try {
      const auto u = apply_resolvent(model, ell, sigma, f, opts);
      const double s = std::abs(sigma);
      NormRow row{sigma, 0.0, 0.0};
      double sup_inner = 0.0;
      for (std::size_t j = 0; j < u.size(); ++j) {
        const double r = u.r[j];
        const double a = std::abs(u.value(j));
        row.n_lo = std::max(row.n_lo, std::pow(r / (1.0 + s * r), p) * a);
        if (r <= R0) sup_inner = std::max(sup_inner, a);
      }
      row.n_hi = s * sup_inner;
      scan.rows[std::size_t(i)] = row;
    } catch (...) {
      errors[std::size_t(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  auto stats = [&](auto get, double& ratio, bool& monotone) {
    double lo = INFINITY, hi = 0.0;
    bool inc = true, dec = true;
    for (std::size_t i = 0; i < scan.rows.size(); ++i) {
      const double v = get(scan.rows[i]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (i > 0) {
        const double prev = get(scan.rows[i - 1]);
        inc = inc && v >= prev;
        dec = dec && v <= prev;
      }
    }
    ratio = hi > 0.0 ? hi / lo : 0.0;
    monotone = inc || dec;
  };
  stats([](const NormRow& r) { return r.n_lo; }, scan.lo_ratio, scan.lo_monotone);
  stats([](const NormRow& r) { return r.n_hi; }, scan.hi_ratio, scan.hi_monotone);
  return scan;
}

}  // namespace tailwave
