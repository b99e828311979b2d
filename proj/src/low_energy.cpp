#include "tailwave/low_energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tailwave/errors.hpp"
#include "tailwave/exact_chain.hpp"
#include "tailwave/zero_energy.hpp"

namespace tailwave {

namespace {

constexpr cplx kI(0.0, 1.0);

struct Mode0 {
  cplx nu, lam_minus, lam_plus;
  int k;
};

Mode0 mode0(const ModeModel& model) {
  const cplx nu = nu_ell(model.n, model.alpha, 0);
  const double h = 0.5 * double(model.n - 2);
  return {nu, h - nu, h + nu, ceil_tol(2.0 * nu.real())};
}

cplx solve2(cplx a11, cplx a12, cplx a21, cplx a22, cplx b1, cplx b2, cplx& y) {
  const cplx det = a11 * a22 - a12 * a21;
  y = (a11 * b2 - a21 * b1) / det;
  return (b1 * a22 - b2 * a12) / det;
}

}  // namespace

ChainResult leading_coefficient_chain_detail(const ModeModel& model) {
  const auto m = mode0(model);
  const double half = 0.5 * double(model.n - 1);
  ChainResult out;
  out.f.resize(std::size_t(std::max(m.k, 1)));
  out.f[0] = -2.0 * kI * (m.lam_plus - half - model.S);
  for (int j = 1; j < m.k; ++j) {
    const cplx l = m.lam_plus - double(j);
    const cplx p = -l * l + double(model.n - 2) * l + model.alpha;
    if (std::abs(p) < 1e-12)
      throw Error(ErrorCode::IndicialCollision,
                  "p(lambda^+ - " + std::to_string(j) + ") vanishes: lambda^+ - j is an indicial root");
    out.f[std::size_t(j)] = -2.0 * kI * (l - half - model.S) / p * out.f[std::size_t(j - 1)];
  }
  for (std::size_t j = 0; j < out.f.size(); ++j) {
    const double scale = j == 0 ? 1.0 : std::max(1.0, std::abs(out.f[j - 1]));
    if (std::abs(out.f[j]) < 1e-12 * scale) out.f[j] = 0.0;
  }
  if (model.alpha_rational && model.S == cplx(0.0)) {
    const auto [num, den] = *model.alpha_rational;
    if (const auto ex = exact_leading_chain(model.n, num, den, int(out.f.size()))) {
      bool agree = true;
      for (std::size_t j = 0; j < out.f.size(); ++j)
        agree = agree && std::abs(ex->values[j] - out.f[j]) <= 1e-10 * std::max(1.0, std::abs(ex->values[j]));
      if (!agree)
        throw Error(ErrorCode::IndicialCollision, "exact and floating-point leading chains disagree");
      out.f = ex->values;
      out.exact = ex->symbolic;
    }
  }
  for (std::size_t j = 0; j < out.f.size(); ++j)
    if (out.f[j] == cplx(0.0)) {
      out.first_zero = int(j) + 1;
      break;
    }
  return out;
}

std::vector<cplx> leading_coefficient_chain(const ModeModel& model) {
  return leading_coefficient_chain_detail(model).f;
}

TransitionFaceResult transition_face_solve(const ModeModel& model, cplx f_k0, int sign,
                                           const TransitionFaceOptions& opts) {
  if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidModel, "transition face sign must be +1 or -1");
  const auto report = nondegeneracy_check(model);
  if (report.unhandled_resonant_case)
    throw Error(ErrorCode::UnhandledResonantCase, "lambda^+ - k differs from lambda^- by a positive integer");
  const auto m = mode0(model);
  TransitionFaceResult res;
  res.sign = sign;
  res.log_case = report.tf_log_case;
  res.match_radii = opts.match_radii;
  std::sort(res.match_radii.begin(), res.match_radii.end());
  double fit_tol = opts.fit_tol;
  if (report.near_log_warning) {
    fit_tol *= 10.0;
    res.warnings.push_back("2 nu_0 is within 1e-4 of an integer; fit tolerance widened");
  }
  if (f_k0 == cplx(0.0)) {
    res.estimates.assign(res.match_radii.size(), 0.0);
    return res;
  }

  const int n = model.n;
  const cplx sigma = double(sign);
  const cplx kappa = double(m.k) - m.lam_plus;
  const cplx shift_b = -kI * sigma * (double(n - 1) + 2.0 * model.S);
  OdeSystem hom{[n, sigma](double r) { return double(n - 1) / r + 2.0 * kI * sigma; },
                [alpha = model.alpha, shift_b](double r) { return alpha / (r * r) + shift_b / r; },
                {}};
  OdeSystem forced = hom;
  forced.f = [f_k0, kappa](double r) { return f_k0 * std::exp((kappa - 2.0) * std::log(r)); };

  OriginSeries s;
  s.ra = {double(n - 1), 2.0 * kI * sigma};
  s.r2b = {model.alpha, shift_b};
  s.radius = INFINITY;
  const int M = 60;
  const auto fp = frobenius_forced_series(s, kappa, {f_k0}, M);
  const auto phi = frobenius_series(s, -m.lam_minus, M);
  const double r0 = 0.5;

  IntegrateOptions io;
  io.tol = opts.tol;
  const auto origin_p = integrate(forced, fp.evaluate(r0), r0, res.match_radii, io);
  const auto origin_h = integrate(hom, phi.evaluate(r0), r0, res.match_radii, io);

  const FarField ff{n, model.alpha, sigma, model.S};
  const auto inf_p = forced_series_at_infinity(ff, kappa, f_k0, opts.series_terms);
  const auto inf_h = power_series_at_infinity(ff, 0.5 * double(n - 1) + model.S, opts.series_terms);
  double R = opts.start_radius;
  if (R <= 0.0)
    R = std::max({2.0 * res.match_radii.back(), adaptive_start_radius(inf_p, 10.0, 1e-14),
                  adaptive_start_radius(inf_h, 10.0, 1e-14)});
  std::vector<double> inner_grid = res.match_radii;
  std::vector<double> fit_grid;
  if (res.log_case) {
    fit_grid = geometric_grid(1e-3, 0.04, 1.1);
    inner_grid = merge_grids(inner_grid, fit_grid);
  }
  const auto far_p = integrate(forced, inf_p.evaluate(R), R, inner_grid, io);
  const auto far_h = integrate(hom, inf_h.evaluate(R), R, inner_grid, io);

  cplx C = 0.0;
  for (std::size_t i = 0; i < res.match_radii.size(); ++i) {
    const double r = res.match_radii[i];
    const auto j = *far_p.index_of(r);
    // F_p + A phi = P_inf + C H_inf
    cplx c;
    const cplx A = solve2(origin_h.u[i], -far_h.u[j], origin_h.du[i], -far_h.du[j], far_p.u[j] - origin_p.u[i],
                          far_p.du[j] - origin_p.du[i], c);
    res.estimates.push_back(A);
    C = c;
  }
  const cplx A = res.estimates.back();
  for (const auto& e : res.estimates)
    res.match_residual = std::max(res.match_residual, std::abs(e - A) / std::max(std::abs(A), 1e-300));

  if (!res.log_case) {
    res.u_prime_0 = A;
  } else {
    res.u_prime_1 = A;
    res.u_prime_0_series = fp.d.empty() ? cplx(0.0) : fp.d[0];
    // Fit r^{lambda^-} u' near 0 by the log-Frobenius structure plus the excluded branch.
    std::vector<double> rr;
    std::vector<cplx> vv;
    for (double r : fit_grid) {
      const auto j = *far_p.index_of(r);
      rr.push_back(r);
      vv.push_back((far_p.u[j] + C * far_h.u[j]) * std::exp(m.lam_minus * std::log(r)));
    }
    const cplx gap = m.lam_minus - m.lam_plus;
    std::vector<PowerBasis> basis{{0.0, true}, {0.0, false}, {-gap, false}};
    for (int K = 1; K <= 3; ++K) {
      basis.push_back({-double(K), true});
      basis.push_back({-double(K), false});
    }
    const auto coef = fit_power_basis(rr, vv, basis);
    res.u_prime_0 = coef[0];
    res.singular_residual = std::abs(coef[2]) / std::max(std::abs(coef[0]), 1e-300);
  }
  if (res.match_residual > fit_tol)
    throw Error(ErrorCode::FitInvalid, "transition-face coefficient differs across matching radii by " +
                                           std::to_string(res.match_residual));
  return res;
}

RadialSolution hankel_outgoing_solution(cplx nu, std::span<const double> z, double tol) {
  if (!(nu.real() > 0.0)) throw Error(ErrorCode::InvalidModel, "Hankel order needs Re nu > 0");
  if (z.empty() || !(z.front() > 0.0)) throw Error(ErrorCode::GridMismatch, "z grid must be positive");
  const cplx mu4 = 4.0 * nu * nu;
  double Z = std::max(2.0 * z.back(), 40.0 + 2.0 * std::norm(nu));
  for (int attempt = 0; attempt < 20; ++attempt, Z *= 2.0) {
    cplx sum = 1.0, dsum = 0.0, a = 1.0, ik = 1.0;
    bool converged = false;
    double prev = INFINITY;
    for (int k = 1; k < 200; ++k) {
      a *= (mu4 - double((2 * k - 1) * (2 * k - 1))) / (8.0 * double(k));
      ik *= kI;
      const cplx term = ik * a * std::pow(Z, -double(k));
      const double mag = std::abs(term);
      if (mag > prev) break;
      sum += term;
      dsum += -double(k) * term / Z;
      prev = mag;
      if (mag < 1e-17 * std::abs(sum)) {
        converged = true;
        break;
      }
    }
    if (!converged) continue;
    const cplx pref = std::sqrt(2.0 / (std::numbers::pi * Z)) *
                      std::exp(kI * (Z - nu * std::numbers::pi / 2.0 - std::numbers::pi / 4.0));
    const State y{pref * sum, pref * ((-0.5 / Z + kI) * sum + dsum)};
    OdeSystem bessel{[](double x) { return cplx(1.0 / x); },
                     [nu](double x) { return nu * nu / (x * x) - 1.0; }, {}};
    IntegrateOptions io;
    io.tol = tol;
    io.renormalize = true;
    return integrate(bessel, y, Z, z, io);
  }
  throw Error(ErrorCode::SlowConvergence, "Hankel asymptotic series did not converge");
}

std::vector<cplx> hankel_outgoing(cplx nu, std::span<const double> z, double tol) {
  const auto sol = hankel_outgoing_solution(nu, z, tol);
  std::vector<cplx> out(sol.size());
  for (std::size_t i = 0; i < sol.size(); ++i) out[i] = sol.value(i);
  return out;
}

double ProfileData::a_plus(double v) const {
  if (v < 0.0) return NAN;
  switch (a_plus_kind) {
    case APlusKind::MinkowskiEven: return std::pow(v / (v + 2.0), 0.5 * double(n - 1));
    case APlusKind::InverseSquare: return std::pow(v / (v + 2.0), 0.5 + nu0.real());
    case APlusKind::Unavailable: break;
  }
  return NAN;
}

double ProfileData::a_T_at(double r) const {
  const double lm = lambda_minus.real();
  if (!a_T) return std::pow(jbracket(r), -lm);
  if (r >= a_T->r.front() && r <= a_T->r.back()) return a_T->interpolate(r).u.real();
  if (r > a_T->r.back() && a_T->connection) {
    const auto& c = *a_T->connection;
    return (c.c_minus * std::pow(r, -lm)).real() +
           (c.c_plus * std::exp(-(double(n - 2) - lambda_minus) * std::log(r))).real();
  }
  return a_T->value(0).real();
}

std::string ProfileData::a_plus_tag() const {
  switch (a_plus_kind) {
    case APlusKind::MinkowskiEven: return "minkowski_even(" + std::to_string(n) + ")";
    case APlusKind::InverseSquare: {
      std::string s = std::to_string(nu0.real());
      return "inverse_square(" + s + ")";
    }
    case APlusKind::Unavailable: break;
  }
  return "unavailable";
}

ExpansionLedger build_ledger(const ModeModel& model, const LedgerOptions& opts) {
  ExpansionLedger L;
  L.report = nondegeneracy_check(model);
  const auto m = mode0(model);
  L.k = m.k;
  L.log_case = L.report.tf_log_case;
  L.warnings = L.report.warnings;
  const auto chain = leading_coefficient_chain_detail(model);
  L.f0_chain = chain.f;
  L.f0_exact = chain.exact;
  if (chain.first_zero) {
    L.degenerate = true;
    L.degenerate_at = chain.first_zero;
    L.warnings.push_back("degenerate: stronger decay (leading coefficient f_" +
                         std::to_string(*chain.first_zero) + " vanishes)");
    return L;
  }
  if (L.report.unhandled_resonant_case)
    throw Error(ErrorCode::UnhandledResonantCase, "integer gap with lambda^+ - k != lambda^-");

  if (opts.with_u_j) {
    for (int j = 1; j < m.k; ++j) {
      const cplx fj = L.f0_chain[std::size_t(j - 1)];
      const cplx ex = -(m.lam_plus - double(j)) - 2.0;
      ModeModel m0 = model.with_ell(0);
      const auto u = solve_zero_energy(m0, 0, RadialProfile::power_tail(fj, ex));
      const cplx l = m.lam_plus - double(j);
      const cplx p = -l * l + double(model.n - 2) * l + model.alpha;
      const std::size_t last = u.size() - 1;
      const auto [v, c] = connection_at({u.u[last], u.du[last]}, u.r[last], l, m.lam_plus);
      (void)c;
      L.u_j.push_back(u);
      L.u_j_predicted.push_back(fj / p);
      L.u_j_fitted.push_back(v);
    }
  }

  const cplx fk = L.f0_chain.back();
  L.tf_plus = transition_face_solve(model, fk, +1, opts.tf);
  L.tf_minus = transition_face_solve(model, fk, -1, opts.tf);
  L.u_prime_plus0 = L.tf_plus->u_prime_0;
  L.u_prime_minus0 = L.tf_minus->u_prime_0;
  for (const auto* tf : {&*L.tf_plus, &*L.tf_minus})
    for (const auto& w : tf->warnings) L.warnings.push_back(w);
  return L;
}

ProfileData assemble_profile(const ModeModel& model, const ExpansionLedger& ledger) {
  if (ledger.degenerate)
    throw Error(ErrorCode::DegenerateLedger, "ledger is degenerate; decay rates are upper bounds only");
  const auto ind = indicial_roots(model, 0);
  ProfileData p;
  p.n = model.n;
  p.t_exponent_T = ind.beta_plus - ind.beta_minus + 1.0;
  p.t_exponent_iota = ind.beta_plus + 1.0;
  p.lambda_minus = ind.lambda_minus[0];
  p.nu0 = ind.nu[0];
  p.log_case = ledger.log_case;
  p.a_T = std::make_shared<const RadialSolution>(large_zero_state(model));
  if (model.S != cplx(0.0) || p.nu0.imag() != 0.0)
    p.a_plus_kind = APlusKind::Unavailable;
  else if (model.alpha == cplx(0.0) && model.n % 2 == 0)
    p.a_plus_kind = APlusKind::MinkowskiEven;
  else
    p.a_plus_kind = APlusKind::InverseSquare;
  return p;
}

}  // namespace tailwave
