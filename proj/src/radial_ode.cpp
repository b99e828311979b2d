#include "tailwave/radial_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "tailwave/errors.hpp"

namespace tailwave {

namespace {

constexpr cplx kI(0.0, 1.0);

template <std::size_t N>
using Vec = std::array<cplx, N>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t N>
struct StepControl {
  double h = 0.0;
  double err_old = 1e-4;
  long steps = 0;
  long max_steps = 10'000'000;
  double tol = 1e-10;
  std::array<double, N> qmax{};  // running magnitude of quadrature components
};

// Componentwise scale: the ODE pair (u, u') shares a floor of 1e-3 times the
// pair magnitude so zero crossings do not force tiny steps; quadrature
// components are measured against their running maximum.
template <std::size_t N>
double error_norm(const Vec<N>& y, const Vec<N>& yn, const Vec<N>& e, const StepControl<N>& c,
                  double* pair_err = nullptr) {
  const double g = std::max({std::abs(y[0]), std::abs(y[1]), std::abs(yn[0]), std::abs(yn[1])});
  double err = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double sc = std::max(std::abs(y[i]), std::abs(yn[i]));
    if (i < 2)
      sc = std::max(sc, 1e-3 * g);
    else
      sc = std::max(sc, c.qmax[i]);
    sc = std::max(sc, 1e-300);
    err = std::max(err, std::abs(e[i]) / (c.tol * sc));
    if (i == 1 && pair_err) *pair_err = err;
  }
  return err;
}

template <std::size_t N, class Rhs>
void advance(const Rhs& rhs, double& x, Vec<N>& y, double x_end, StepControl<N>& c) {
  if (x == x_end) return;
  const double dir = x_end > x ? 1.0 : -1.0;
  if (c.h <= 0.0) c.h = 0.01 * std::min(std::abs(x_end - x), std::max(std::abs(x), 1e-3));
  Vec<N> k1, k2, k3, k4, k5, k6, k7, yt, yn, e;
  // Coefficients may jump at the interval ends: sample them from the inside.
  const double nudge = 1e-13 * std::max(1.0, std::abs(x_end));
  rhs(x + dir * nudge, y, k1);
  for (;;) {
    const double remaining = std::abs(x_end - x);
    bool last = false;
    double h = c.h;
    if (h >= remaining * (1.0 - 1e-12)) {
      h = remaining;
      last = true;
    }
    const double hs = dir * h;
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * a21 * k1[i];
    rhs(x + c2 * hs, yt, k2);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    rhs(x + c3 * hs, yt, k3);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(x + c4 * hs, yt, k4);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(x + c5 * hs, yt, k5);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double xn = last ? x_end : x + hs;
    const double xs = last ? x_end - dir * nudge : xn;
    rhs(xs, yt, k6);
    for (std::size_t i = 0; i < N; ++i)
      yn[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    rhs(xs, yn, k7);
    for (std::size_t i = 0; i < N; ++i)
      e[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    double pair_err = 0.0;
    double err = error_norm<N>(y, yn, e, c, &pair_err);
    // A quadrature switching on through a high-order zero keeps a fixed relative
    // error at any step size; accept once the solution pair itself is resolved.
    if (err > 1.0 && pair_err <= 1.0 && h < 1e-12 * std::max(1.0, std::abs(x))) err = pair_err;
    if (!std::isfinite(err)) {
      bool finite_state = true;
      for (const auto& v : yn) finite_state = finite_state && std::isfinite(v.real()) && std::isfinite(v.imag());
      if (!finite_state && h < 1e-12 * std::max(1.0, std::abs(x)))
        throw Error(ErrorCode::NonFinite, "non-finite state near r = " + std::to_string(x));
      c.h = 0.2 * h;
      continue;
    }
    if (++c.steps > c.max_steps)
      throw Error(ErrorCode::StepFailure, "step budget exhausted near r = " + std::to_string(x));
    if (err <= 1.0) {
      double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(c.err_old, 0.4 / 5.0);
      fac = std::clamp(fac, 0.2, 5.0);
      c.err_old = std::max(err, 1e-4);
      x = xn;
      y = yn;
      k1 = k7;
      for (std::size_t i = 2; i < N; ++i) c.qmax[i] = std::max(c.qmax[i], std::abs(y[i]));
      if (!last || fac < 1.0) c.h = h * fac;
      if (last) return;
    } else {
      const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      c.h = h * fac;
      if (c.h < 1e-14 * std::max(1.0, std::abs(x)))
        throw Error(ErrorCode::StepFailure, "step size underflow near r = " + std::to_string(x));
    }
  }
}

// Stops in integration order: output grid points and interior breakpoints.
std::vector<std::pair<double, long>> build_stops(double r0, std::span<const double> grid,
                                                 const std::vector<double>& breakpoints, bool outward) {
  std::vector<std::pair<double, long>> stops;
  for (std::size_t i = 0; i < grid.size(); ++i) stops.emplace_back(grid[i], long(i));
  const double lo = outward ? r0 : grid.front();
  const double hi = outward ? grid.back() : r0;
  for (double b : breakpoints)
    if (b > lo && b < hi) stops.emplace_back(b, -1);
  std::sort(stops.begin(), stops.end(), [&](const auto& p, const auto& q) {
    return outward ? p.first < q.first : p.first > q.first;
  });
  return stops;
}

template <std::size_t N, class Rhs, class Emit>
void drive(const Rhs& rhs, Vec<N> y, double r0, std::span<const double> grid,
           const IntegrateOptions& opts, Emit emit) {
  if (grid.empty()) return;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::GridMismatch, "output grid must be strictly increasing");
  if (!(grid.front() > 0.0) || !(r0 > 0.0))
    throw Error(ErrorCode::GridMismatch, "radial integration range must avoid r = 0");
  if (!(opts.tol > 1e-14 && opts.tol < 1e-4))
    throw Error(ErrorCode::StepFailure, "tolerance must lie in (1e-14, 1e-4)");
  const bool outward = r0 <= grid.front();
  if (!outward && r0 < grid.back())
    throw Error(ErrorCode::GridMismatch, "start radius must lie outside the output grid");
  StepControl<N> c;
  c.tol = opts.tol;
  c.max_steps = opts.max_steps;
  double x = r0;
  double log_scale = 0.0;
  for (const auto& [r, idx] : build_stops(r0, grid, opts.breakpoints, outward)) {
    advance<N>(rhs, x, y, r, c);
    x = r;
    if (opts.renormalize) {
      const double m = std::max(std::abs(y[0]), std::abs(y[1]));
      if (m > 1e100 || (m > 0.0 && m < 1e-100)) {
        for (std::size_t i = 0; i < 2; ++i) y[i] /= m;
        log_scale += std::log(m);
      }
    }
    for (std::size_t i = 0; i < N; ++i)
      if (!std::isfinite(y[i].real()) || !std::isfinite(y[i].imag()))
        throw Error(ErrorCode::NonFinite, "non-finite solution at r = " + std::to_string(r));
    if (idx >= 0) emit(std::size_t(idx), y, log_scale);
  }
}

}  // namespace

OdeSystem make_system(const ModeCoefficients& coeffs) {
  return OdeSystem{[coeffs](double r) { return coeffs.a(r); },
                   [coeffs](double r) { return coeffs.b(r); }, {}};
}

std::optional<std::size_t> RadialSolution::index_of(double radius, double rel_tol) const {
  auto it = std::lower_bound(r.begin(), r.end(), radius * (1.0 - rel_tol));
  if (it != r.end() && std::abs(*it - radius) <= rel_tol * std::abs(radius))
    return std::size_t(it - r.begin());
  return std::nullopt;
}

cplx RadialSolution::value(std::size_t i) const {
  return log_scale.empty() ? u[i] : u[i] * std::exp(log_scale[i]);
}

cplx RadialSolution::derivative(std::size_t i) const {
  return log_scale.empty() ? du[i] : du[i] * std::exp(log_scale[i]);
}

State RadialSolution::interpolate(double radius) const {
  if (r.empty() || radius < r.front() || radius > r.back())
    throw Error(ErrorCode::Extrapolation, "radius " + std::to_string(radius) + " outside solution grid");
  auto it = std::upper_bound(r.begin(), r.end(), radius);
  std::size_t j = std::min<std::size_t>(std::size_t(it - r.begin()), r.size() - 1);
  if (j == 0) j = 1;
  const std::size_t i = j - 1;
  const double h = r[j] - r[i];
  const double s = (radius - r[i]) / h;
  const cplx p0 = value(i), p1 = value(j), m0 = derivative(i) * h, m1 = derivative(j) * h;
  const double s2 = s * s, s3 = s2 * s;
  const cplx u_ = (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * p1 +
                  (s3 - s2) * m1;
  const cplx du_ = ((6 * s2 - 6 * s) * p0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * p1 +
                    (3 * s2 - 2 * s) * m1) /
                   h;
  return {u_, du_};
}

RadialSolution RadialSolution::scaled(cplx factor) const {
  RadialSolution out = *this;
  for (auto& v : out.u) v *= factor;
  for (auto& v : out.du) v *= factor;
  if (out.connection) {
    out.connection->c_minus *= factor;
    out.connection->c_plus *= factor;
    out.connection->c_log *= factor;
  }
  return out;
}

RadialSolution integrate(const OdeSystem& sys, State y0, double r0, std::span<const double> grid,
                         const IntegrateOptions& opts) {
  RadialSolution sol;
  sol.r.assign(grid.begin(), grid.end());
  sol.u.resize(grid.size());
  sol.du.resize(grid.size());
  if (opts.renormalize) sol.log_scale.assign(grid.size(), 0.0);
  auto rhs = [&](double r, const Vec<2>& y, Vec<2>& dy) {
    dy[0] = y[1];
    dy[1] = -sys.a(r) * y[1] + sys.b(r) * y[0];
    if (sys.f) dy[1] -= sys.f(r);
  };
  drive<2>(rhs, Vec<2>{y0.u, y0.du}, r0, grid, opts, [&](std::size_t i, const Vec<2>& y, double ls) {
    sol.u[i] = y[0];
    sol.du[i] = y[1];
    if (opts.renormalize) sol.log_scale[i] = ls;
  });
  return sol;
}

QuadratureSolution integrate_with_quadrature(const OdeSystem& sys, State y0, double r0,
                                             std::span<const double> grid,
                                             const std::function<cplx(double)>& weight, cplx q0,
                                             const IntegrateOptions& opts) {
  if (opts.renormalize)
    throw Error(ErrorCode::StepFailure, "renormalisation is incompatible with quadrature components");
  QuadratureSolution out;
  out.sol.r.assign(grid.begin(), grid.end());
  out.sol.u.resize(grid.size());
  out.sol.du.resize(grid.size());
  out.q.resize(grid.size());
  auto rhs = [&](double r, const Vec<3>& y, Vec<3>& dy) {
    dy[0] = y[1];
    dy[1] = -sys.a(r) * y[1] + sys.b(r) * y[0];
    if (sys.f) dy[1] -= sys.f(r);
    dy[2] = weight(r) * y[0];
  };
  drive<3>(rhs, Vec<3>{y0.u, y0.du, q0}, r0, grid, opts, [&](std::size_t i, const Vec<3>& y, double) {
    out.sol.u[i] = y[0];
    out.sol.du[i] = y[1];
    out.q[i] = y[2];
  });
  return out;
}

State FrobeniusSeries::evaluate(double r) const {
  const double L = std::log(r);
  cplx u = 0.0, du = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const cplx e = mu + double(k);
    const cplx dk = d.empty() ? cplx(0.0) : d[k];
    const cplx pw = std::exp(e * L);
    u += (c[k] + dk * L) * pw;
    du += (e * (c[k] + dk * L) + dk) * pw / r;
  }
  return {u, du};
}

double FrobeniusSeries::tail_estimate(double r) const {
  const double L = std::log(r);
  double total = 0.0, last = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const cplx dk = d.empty() ? cplx(0.0) : d[k];
    prev = last;
    last = std::abs((c[k] + dk * L) * std::exp((mu + double(k)) * L));
    total += last;
  }
  return total > 0.0 ? std::max(last, prev) / total : 0.0;
}

namespace {

cplx series_coeff(const std::vector<cplx>& v, std::size_t j) { return j < v.size() ? v[j] : cplx(0.0); }

cplx indicial_poly(const OriginSeries& s, cplx m) {
  return m * (m - 1.0) + series_coeff(s.ra, 0) * m - series_coeff(s.r2b, 0);
}

bool negligible(cplx x, cplx scale) { return std::abs(x) <= 1e-11 * std::max(1.0, std::abs(scale)); }

}  // namespace

FrobeniusSeries frobenius_series(const OriginSeries& s, cplx mu, int m) {
  if (!negligible(indicial_poly(s, mu), mu * mu))
    throw Error(ErrorCode::ResonantExponent, "mu is not a root of the indicial polynomial at r = 0");
  FrobeniusSeries out;
  out.mu = mu;
  out.c.assign(std::size_t(std::max(m, 1)), 0.0);
  out.c[0] = 1.0;
  for (std::size_t K = 1; K < out.c.size(); ++K) {
    cplx acc = 0.0;
    for (std::size_t j = 1; j <= K; ++j) {
      const cplx e = mu + double(K - j);
      acc += out.c[K - j] * (series_coeff(s.ra, j) * e - series_coeff(s.r2b, j));
    }
    const cplx F = indicial_poly(s, mu + double(K));
    if (negligible(F, (mu + double(K)) * (mu + double(K)))) {
      if (negligible(acc, 1.0)) continue;  // free coefficient, no log needed
      throw Error(ErrorCode::ResonantExponent,
                  "Frobenius recursion denominator vanishes at order " + std::to_string(K));
    }
    out.c[K] = -acc / F;
  }
  return out;
}

FrobeniusSeries frobenius_forced_series(const OriginSeries& s, cplx kappa, const std::vector<cplx>& g,
                                        int m) {
  FrobeniusSeries out;
  out.mu = kappa;
  const std::size_t M = std::size_t(std::max(m, 1));
  out.c.assign(M, 0.0);
  out.d.assign(M, 0.0);
  bool have_log = false;
  for (std::size_t K = 0; K < M; ++K) {
    cplx A = 0.0, B = series_coeff(g, K);
    for (std::size_t j = 1; j <= K; ++j) {
      const cplx e = kappa + double(K - j);
      const cplx E = series_coeff(s.ra, j) * e - series_coeff(s.r2b, j);
      A += out.d[K - j] * E;
      B += out.c[K - j] * E + out.d[K - j] * series_coeff(s.ra, j);
    }
    const cplx e = kappa + double(K);
    const cplx F = indicial_poly(s, e);
    const cplx dF = 2.0 * e - 1.0 + series_coeff(s.ra, 0);
    if (!negligible(F, e * e)) {
      out.d[K] = -A / F;
      out.c[K] = -(B + out.d[K] * dF) / F;
      continue;
    }
    if (!negligible(A, 1.0) || have_log)
      throw Error(ErrorCode::ResonantExponent, "forced Frobenius series needs a log^2 term");
    have_log = true;
    out.d[K] = -B / dF;
    out.c[K] = 0.0;
  }
  if (!have_log) {
    bool any = false;
    for (const auto& v : out.d) any = any || v != cplx(0.0);
    if (!any) out.d.clear();
  }
  return out;
}

State frobenius_start(const OriginSeries& s, cplx mu, int m, double r0) {
  return frobenius_series(s, mu, m).evaluate(r0);
}

State AsymptoticSeries::evaluate(double r) const {
  const double L = std::log(r);
  cplx u = 0.0, du = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const cplx e = -lead - double(k);
    const cplx pw = std::exp(e * L);
    u += d[k] * pw;
    du += e * d[k] * pw / r;
  }
  return {u, du};
}

double AsymptoticSeries::tail_estimate(double r) const {
  if (d.size() <= 1) return 0.0;
  const double L = std::log(r);
  double total = 0.0, last = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    prev = last;
    last = std::abs(d[k] * std::exp((-lead - double(k)) * L));
    total += last;
  }
  return total > 0.0 ? std::max(last, prev) / total : 0.0;
}

AsymptoticSeries power_series_at_infinity(const FarField& ff, cplx lam, int m) {
  AsymptoticSeries out;
  out.lead = lam;
  const std::size_t M = std::size_t(std::max(m, 1));
  if (ff.sigma == cplx(0.0)) {
    if (!negligible(ff.euler(-lam), lam * lam))
      throw Error(ErrorCode::InvalidModel, "exponent is not an indicial root of the far-field operator");
    out.d = {1.0};
    return out;
  }
  if (!negligible(ff.shift(-lam), ff.sigma * (1.0 + std::abs(lam))))
    throw Error(ErrorCode::InvalidModel, "exponent is not the outgoing exponent (n-1)/2 + S");
  out.d.assign(M, 0.0);
  out.d[0] = 1.0;
  for (std::size_t k = 1; k < M; ++k) {
    const cplx mk = -lam - double(k);
    out.d[k] = -ff.euler(mk + 1.0) * out.d[k - 1] / ff.shift(mk);
  }
  return out;
}

AsymptoticSeries forced_series_at_infinity(const FarField& ff, cplx kappa, cplx g0, int m) {
  if (ff.sigma == cplx(0.0))
    throw Error(ErrorCode::InvalidModel, "forced series at infinity needs sigma != 0");
  AsymptoticSeries out;
  out.lead = -(kappa - 1.0);
  const std::size_t M = std::size_t(std::max(m, 1));
  out.d.assign(M, 0.0);
  for (std::size_t k = 0; k < M; ++k) {
    const cplx mk = kappa - 1.0 - double(k);
    const cplx sh = ff.shift(mk);
    if (negligible(sh, ff.sigma))
      throw Error(ErrorCode::ResonantExponent, "forcing exponent meets the outgoing exponent");
    out.d[k] = k == 0 ? -g0 / sh : -ff.euler(mk + 1.0) * out.d[k - 1] / sh;
  }
  return out;
}

State power_asymptotic_start(const FarField& ff, cplx lam, int m, double R, double tol) {
  const auto series = power_series_at_infinity(ff, lam, m);
  if (series.tail_estimate(R) > tol)
    throw Error(ErrorCode::SlowConvergence, "asymptotic series tail above tolerance at R = " + std::to_string(R));
  return series.evaluate(R);
}

double adaptive_start_radius(const AsymptoticSeries& series, double r_min, double tol, double r_cap) {
  double R = r_min;
  while (series.tail_estimate(R) > tol) {
    R *= 1.25;
    if (R > r_cap)
      throw Error(ErrorCode::SlowConvergence, "no start radius below " + std::to_string(r_cap));
  }
  return R;
}

cplx wronskian(State u, State v, cplx sigma, int n, double r) {
  return std::exp(double(n - 1) * std::log(r) + 2.0 * kI * sigma * r) * (u.u * v.du - u.du * v.u);
}

cplx wronskian(const RadialSolution& u, const RadialSolution& v, cplx sigma, int n, double r) {
  const auto i = u.index_of(r);
  const auto j = v.index_of(r);
  if (!i || !j) throw Error(ErrorCode::GridMismatch, "radius " + std::to_string(r) + " not on both grids");
  const double ls = u.scale(*i) + v.scale(*j);
  const cplx w = u.u[*i] * v.du[*j] - u.du[*i] * v.u[*j];
  return std::exp(ls + double(n - 1) * std::log(r) + 2.0 * kI * sigma * r) * w;
}

std::pair<cplx, cplx> connection_at(State y, double r, cplx lam_minus, cplx lam_plus) {
  const double L = std::log(r);
  const cplx phi = std::exp(-lam_minus * L), dphi = -lam_minus * phi / r;
  const cplx psi = std::exp(-lam_plus * L), dpsi = -lam_plus * psi / r;
  const cplx det = phi * dpsi - dphi * psi;
  return {(y.u * dpsi - y.du * psi) / det, (phi * y.du - dphi * y.u) / det};
}

Connection fit_connection(State y1, double R1, State y2, double R2, cplx lam_minus, cplx lam_plus,
                          double fit_tol) {
  const auto [m1, p1] = connection_at(y1, R1, lam_minus, lam_plus);
  const auto [m2, p2] = connection_at(y2, R2, lam_minus, lam_plus);
  Connection c;
  c.c_minus = m2;
  c.c_plus = p2;
  c.R1 = R1;
  c.R2 = R2;
  const double scale = std::max({std::abs(m2), std::abs(p2), 1e-300});
  c.residual = std::max(std::abs(m1 - m2), std::abs(p1 - p2)) / scale;
  c.valid = c.residual < fit_tol;
  return c;
}

std::vector<cplx> fit_power_basis(std::span<const double> r, std::span<const cplx> u,
                                  std::span<const PowerBasis> basis) {
  if (r.size() != u.size() || r.size() < basis.size())
    throw Error(ErrorCode::FitInvalid, "not enough samples for the power-basis fit");
  const Eigen::Index rows = Eigen::Index(r.size()), cols = Eigen::Index(basis.size());
  Eigen::MatrixXcd A(rows, cols);
  Eigen::VectorXcd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double L = std::log(r[std::size_t(i)]);
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& e = basis[std::size_t(j)];
      A(i, j) = std::exp(-e.exponent * L) * (e.log ? L : 1.0);
    }
    b(i) = u[std::size_t(i)];
  }
  Eigen::VectorXd norms = A.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < cols; ++j)
    if (norms(j) > 0) A.col(j) /= norms(j);
  Eigen::VectorXcd x = A.colPivHouseholderQr().solve(b);
  std::vector<cplx> out(basis.size());
  for (Eigen::Index j = 0; j < cols; ++j) out[std::size_t(j)] = norms(j) > 0 ? x(j) / norms(j) : 0.0;
  return out;
}

std::vector<double> geometric_grid(double r0, double r1, double ratio) {
  std::vector<double> g;
  for (double r = r0; r < r1 * (1.0 - 1e-12); r *= ratio) g.push_back(r);
  g.push_back(r1);
  return g;
}

std::vector<double> uniform_grid(double r0, double r1, double h) {
  const long n = std::max(1L, long(std::ceil((r1 - r0) / h - 1e-9)));
  std::vector<double> g(std::size_t(n) + 1);
  for (long i = 0; i <= n; ++i) g[std::size_t(i)] = r0 + (r1 - r0) * double(i) / double(n);
  return g;
}

std::vector<double> merge_grids(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  std::vector<double> out;
  for (double x : a)
    if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, std::abs(x))) out.push_back(x);
  return out;
}

std::vector<double> fd_weights(double x0, std::span<const double> x, int m) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(std::size_t(m) + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(int(i), m);
    double c2_ = 1.0;
    const double c5_ = c4;
    c4 = x[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3_ = x[i] - x[j];
      c2_ *= c3_;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][std::size_t(k)] = c1 * (double(k) * c[i - 1][std::size_t(k - 1)] - c5_ * c[i - 1][std::size_t(k)]) / c2_;
        c[i][0] = -c1 * c5_ * c[i - 1][0] / c2_;
      }
      for (int k = mn; k >= 1; --k)
        c[j][std::size_t(k)] = (c4 * c[j][std::size_t(k)] - double(k) * c[j][std::size_t(k - 1)]) / c3_;
      c[j][0] = c4 * c[j][0] / c3_;
    }
    c1 = c2_;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][std::size_t(m)];
  return w;
}

double ode_residual(const OdeSystem& sys, const RadialSolution& sol, const std::vector<double>& breakpoints,
                    const std::function<double(double)>& weight, double r_lo, double r_hi) {
  const std::size_t n = sol.size();
  if (n < 7) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = sol.r[i];
    if (r < r_lo || r > r_hi) continue;
    const std::size_t lo = i < 3 ? 0 : std::min(i - 3, n - 7);
    const double a = sol.r[lo], b = sol.r[lo + 6];
    bool straddles = false;
    for (double bp : breakpoints)
      if (bp > a * (1 + 1e-12) && bp < b * (1 - 1e-12)) straddles = true;
    if (straddles) continue;
    const auto w = fd_weights(r, std::span<const double>(sol.r.data() + lo, 7), 1);
    cplx d2 = 0.0;
    for (std::size_t j = 0; j < 7; ++j) d2 += w[j] * sol.derivative(lo + j);
    cplx res = -d2 - sys.a(r) * sol.derivative(i) + sys.b(r) * sol.value(i);
    if (sys.f) res -= sys.f(r);
    const double wt = weight ? weight(r) : 1.0;
    worst = std::max(worst, wt * std::abs(res));
  }
  return worst;
}

}  // namespace tailwave
