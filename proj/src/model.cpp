#include "tailwave/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tailwave/errors.hpp"
#include "tailwave/io.hpp"

namespace tailwave {

namespace {
constexpr cplx kI(0.0, 1.0);
}

double NonstatPerturbation::operator()(double t, double r) const {
  return eps * std::pow(jbracket(t - r), -delta_t) * w(r).real();
}

double NonstatPerturbation::class_ratio(double t, double r, double delta) const {
  const double bound = std::pow(t, -delta) * t / (jbracket(r) * jbracket(r) * jbracket(t - r));
  return std::abs((*this)(t, r)) / bound;
}

bool alpha_admissible(int n, cplx alpha) {
  const double edge = -0.25 * double(n - 2) * double(n - 2);
  return !(alpha.imag() == 0.0 && alpha.real() <= edge);
}

double find_r_match(const RadialProfile& potential, double delta, double tol) {
  if (potential.is_zero()) return 2.0;
  double r_hi = 1e5;
  if (const auto* t = std::get_if<RadialProfile::Table>(&potential.family())) r_hi = t->spline.back();
  const double end = potential.support_end();
  if (end < r_hi) r_hi = std::max(end, 2.0);
  std::vector<double> grid;
  for (double r = 2.0; r < r_hi; r *= 1.005) grid.push_back(r);
  grid.push_back(r_hi);
  // Running maximum of |r^{2+delta} V| from the outside in.
  std::vector<double> tail(grid.size());
  double m = 0.0;
  for (std::size_t i = grid.size(); i-- > 0;) {
    m = std::max(m, std::abs(potential(grid[i])) * std::pow(grid[i], 2.0 + delta));
    tail[i] = m;
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (tail[i] < tol * std::pow(grid[i], delta)) return grid[i];
  if (end <= r_hi) return std::max(end, 2.0);
  throw Error(ErrorCode::InvalidModel,
              "potential " + potential.describe() + " is not negligible below r = 1e5 (or table end)");
}

ModeModel& ModeModel::finalize() {
  if (n < 1) throw Error(ErrorCode::InvalidModel, "dimension n must be >= 1");
  if (ell < 0) throw Error(ErrorCode::InvalidModel, "ell must be >= 0");
  if (!(delta > 0)) throw Error(ErrorCode::InvalidModel, "delta must be positive");
  if (!alpha_admissible(n, alpha)) {
    std::ostringstream os;
    os << "alpha = " << alpha << " lies on (-inf, -((n-2)/2)^2]";
    throw Error(ErrorCode::InadmissibleAlpha, os.str());
  }
  if (r_match <= 0.0) r_match = find_r_match(potential, delta, match_tol);
  if (r_match < 2.0) r_match = 2.0;
  if (perturbation && !(perturbation->delta_t > 0))
    throw Error(ErrorCode::InvalidModel, "perturbation delta_t must be positive");
  return *this;
}

ModeModel ModeModel::with_ell(int l) const {
  ModeModel m = *this;
  m.ell = l;
  return m;
}

bool ModeModel::is_real() const {
  return alpha.imag() == 0.0 && S.imag() == 0.0 && potential.is_real();
}

std::string ModeModel::hash() const {
  std::ostringstream os;
  os.precision(17);
  os << n << '|' << ell << '|' << alpha << '|' << S << '|' << potential.describe() << '|' << delta
     << '|' << r_match << '|' << match_tol;
  if (perturbation)
    os << "|pert:" << perturbation->eps << ',' << perturbation->delta_t << ','
       << perturbation->w.describe();
  return fnv1a_hex(os.str());
}

cplx ModeCoefficients::b0(double r) const {
  const double lam = double(model_.angular_eigenvalue(ell_));
  return (lam + model_.alpha_eff(r)) / (r * r) + model_.V(r);
}

cplx ModeCoefficients::b(double r) const {
  return b0(r) - kI * sigma_ * (double(model_.n - 1) + 2.0 * model_.S) / r;
}

OriginSeries ModeCoefficients::origin_series(int m) const {
  OriginSeries s;
  s.ra.assign(static_cast<std::size_t>(m), 0.0);
  s.r2b.assign(static_cast<std::size_t>(m), 0.0);
  s.ra[0] = double(model_.n - 1);
  if (m > 1) s.ra[1] = 2.0 * kI * sigma_;
  s.r2b[0] = double(model_.angular_eigenvalue(ell_));
  if (m > 1) s.r2b[1] = -kI * sigma_ * (double(model_.n - 1) + 2.0 * model_.S);
  const auto v = model_.potential.taylor(m);
  for (int k = 2; k < m; ++k) s.r2b[k] += v[k - 2];
  s.radius = std::min(model_.potential.taylor_radius(), model_.r_match);
  if (model_.alpha != cplx(0.0)) s.radius = std::min(s.radius, 1.0);
  return s;
}

FarField ModeCoefficients::far_field() const {
  return FarField{model_.n, double(model_.angular_eigenvalue(ell_)) + model_.alpha, sigma_, model_.S};
}

ModeCoefficients mode_coefficients(const ModeModel& model, cplx sigma) {
  return ModeCoefficients(model, model.ell, sigma);
}

ModeCoefficients mode_coefficients(const ModeModel& model, int ell, cplx sigma) {
  return ModeCoefficients(model, ell, sigma);
}

std::vector<double> model_breakpoints(const ModeModel& model) {
  std::vector<double> out = model.potential.breakpoints();
  if (model.alpha != cplx(0.0)) {
    out.push_back(1.0);
    out.push_back(2.0);
  }
  if (!model.potential.is_zero()) out.push_back(model.r_match);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::function<cplx(double)> effective_potential(const ModeModel& model) {
  const double base = 0.5 * double(model.n - 2) + double(model.ell);
  return [model, base](double r) {
    const cplx nu2 = base * base + model.alpha_eff(r);
    return (nu2 - 0.25) / (r * r) + model.V(r);
  };
}

void RegionSpec::validate() const {
  switch (kind) {
    case RegionKind::Tplus:
      if (!(param > 0)) throw Error(ErrorCode::ConfigInvalid, "fixed-r observer needs r > 0");
      break;
    case RegionKind::IotaPlus:
      if (!(param > 0 && param < 1)) throw Error(ErrorCode::ConfigInvalid, "ray needs 0 < q < 1");
      break;
    case RegionKind::ScriPlus:
      if (!(param > 0)) throw Error(ErrorCode::ConfigInvalid, "scri observer needs t_* > 0");
      break;
  }
}

double RegionSpec::radius_at(double t) const {
  switch (kind) {
    case RegionKind::Tplus: return param;
    case RegionKind::IotaPlus: return param * t;
    case RegionKind::ScriPlus: return t - param;
  }
  return param;
}

std::string RegionSpec::key() const {
  std::ostringstream os;
  os << (kind == RegionKind::Tplus ? "r_" : kind == RegionKind::IotaPlus ? "ray_" : "scri_") << param;
  return os.str();
}

double rho_T(double t, double r) { return jbracket(r) / t; }
double rho_plus(double t, double r) { return t / (jbracket(r) * jbracket(t - r)); }
double rho_scri(double t, double r) { return jbracket(t - r) / t; }

}  // namespace tailwave
