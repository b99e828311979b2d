#include "tailwave/indicial.hpp"

#include <cmath>
#include <sstream>

#include "tailwave/errors.hpp"

namespace tailwave {

namespace {

constexpr double kLogTol = 1e-10;
constexpr double kLogWarn = 1e-4;

void require_admissible(const ModeModel& model) {
  if (!alpha_admissible(model.n, model.alpha)) {
    std::ostringstream os;
    os << "alpha = " << model.alpha << " is on the excluded ray for n = " << model.n;
    throw Error(ErrorCode::InadmissibleAlpha, os.str());
  }
}

// Distance of x to the positive integers.
double dist_to_naturals(cplx x) {
  const double nearest = std::max(1.0, std::round(x.real()));
  return std::abs(x - nearest);
}

}  // namespace

cplx nu_ell(int n, cplx alpha, int ell) {
  const double base = 0.5 * double(n - 2) + double(ell);
  cplx nu = std::sqrt(cplx(base * base) + alpha);
  if (nu.real() < 0) nu = -nu;
  return nu;
}

int ceil_tol(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) < kLogTol) return static_cast<int>(r);
  return static_cast<int>(std::ceil(x));
}

IndicialData indicial_roots(const ModeModel& model, int ell_max) {
  require_admissible(model);
  IndicialData d;
  d.n = model.n;
  const double half = 0.5 * double(model.n - 2);
  for (int l = 0; l <= ell_max; ++l) {
    const cplx nu = nu_ell(model.n, model.alpha, l);
    d.nu.push_back(nu);
    d.lambda_minus.push_back(half - nu);
    d.lambda_plus.push_back(half + nu);
  }
  const cplx nu0 = nu_ell(model.n, model.alpha, 0);
  d.beta_minus = half - nu0.real();
  d.beta_plus = half + nu0.real();
  d.k = ceil_tol(d.beta_plus - d.beta_minus);
  d.exponents = decay_predictions(model);
  return d;
}

DecayExponents decay_predictions(const ModeModel& model) {
  require_admissible(model);
  const double half = 0.5 * double(model.n - 2);
  const double re_nu = nu_ell(model.n, model.alpha, 0).real();
  const double beta_minus = half - re_nu;
  const double beta_plus = half + re_nu;
  DecayExponents e;
  e.scri = 0.5 * double(model.n - 1) + model.S.real();
  e.iota = beta_plus + 1.0;
  e.T = beta_plus - beta_minus + 1.0;
  e.upper_bound_only = !nondegeneracy_check(model).nondegenerate();
  return e;
}

NondegeneracyReport nondegeneracy_check(const ModeModel& model) {
  require_admissible(model);
  NondegeneracyReport rep;
  const int n = model.n;
  const double half = 0.5 * double(n - 2);
  const cplx nu0 = nu_ell(n, model.alpha, 0);
  const cplx nu1 = nu_ell(n, model.alpha, 1);
  const cplx lp = half + nu0;
  const int k = ceil_tol(2.0 * nu0.real());

  rep.simple_pole = nu1.real() > nu0.real() && std::abs(nu0) > 0.0;

  // f_{j,0} carries the factor (lambda^+ - (j-1) - (n-1)/2 - S) for j = 1..k.
  for (int j = 1; j <= k; ++j) {
    const cplx factor = lp - double(j - 1) - 0.5 * double(n - 1) - model.S;
    if (std::abs(factor) < kLogTol) {
      rep.f_chain_nonzero = false;
      rep.first_vanishing = j;
      break;
    }
  }
  // Denominators p(lambda^+ - j), p(l) = -l^2 + (n-2) l + alpha, for j = 1..k-1.
  for (int j = 1; j < k; ++j) {
    const cplx x = lp - double(j);
    const cplx p = -x * x + double(n - 2) * x + model.alpha;
    if (std::abs(p) < kLogTol) {
      rep.indicial_collision = j;
      break;
    }
  }

  const double d = dist_to_naturals(2.0 * nu0);
  rep.tf_log_case = d < kLogTol;
  if (!rep.tf_log_case && d < kLogWarn) {
    rep.near_log_warning = true;
    std::ostringstream os;
    os << "2 nu_0 = " << 2.0 * nu0 << " is within " << d
       << " of an integer: transition-face solve is numerically stiff";
    rep.warnings.push_back(os.str());
  }
  const double re_gap = 2.0 * nu0.real();
  if (!rep.tf_log_case && std::abs(re_gap - std::round(re_gap)) < kLogTol && std::round(re_gap) >= 1)
    rep.unhandled_resonant_case = true;

  if (model.alpha.imag() == 0.0) {
    // alpha = l(l+n-2) (n odd) or (l+1/2)(l+n-3/2) (n even) for some l in N_0.
    const double a = model.alpha.real();
    const double shift = (n % 2 == 1) ? 0.0 : 0.5;
    // Solve (l+shift)(l+shift+n-2) = a for l.
    const double disc = double(n - 2) * double(n - 2) + 4.0 * a;
    if (disc >= 0) {
      const double x = 0.5 * (-double(n - 2) + std::sqrt(disc)) - shift;
      const double l = std::round(x);
      if (l >= 0 && std::abs(x - l) < kLogTol) rep.eqev_alpha_violation = static_cast<int>(l);
    }
  }
  if (!rep.f_chain_nonzero)
    rep.warnings.push_back("leading-order chain vanishes: decay rates are upper bounds only");
  return rep;
}

}  // namespace tailwave
