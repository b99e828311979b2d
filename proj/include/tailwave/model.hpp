#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tailwave/profile.hpp"

namespace tailwave {

/// Decaying perturbation eps * <t - r>^{-delta_t} * w(r) of the stationary potential.
struct NonstatPerturbation {
  double eps = 0.0;
  double delta_t = 1.0;
  RadialProfile w = RadialProfile::cutoff_inverse_square(1.0);

  double operator()(double t, double r) const;
  /// |V~(t, r)| divided by t^{-delta} <r>^{-2} t / <t - r>; bounded on the admissible class.
  double class_ratio(double t, double r, double delta) const;
};

/// One spherical-harmonic sector of the reduced operator
///   L u = -u'' - a(r) u' + b(r) u,   a = (n-1)/r + 2 i sigma,
///   b = (l(l+n-2) + alpha chi(r)) / r^2 - i sigma (n-1)/r - 2 i sigma S / r + V(r).
/// Immutable after finalize(); safe to share across threads.
struct ModeModel {
  int n = 3;
  int ell = 0;
  cplx alpha = 0.0;
  cplx S = 0.0;
  RadialProfile potential;
  double delta = 1.0;
  double r_match = 0.0;  // 0: determined from the potential by finalize()
  double match_tol = 1e-12;
  std::optional<NonstatPerturbation> perturbation;
  /// Exact rational value of alpha (numerator, denominator) when known.
  std::optional<std::pair<std::int64_t, std::int64_t>> alpha_rational;

  /// Validates invariants and fills r_match. Throws InadmissibleAlpha / InvalidModel.
  ModeModel& finalize();
  ModeModel with_ell(int l) const;

  std::int64_t angular_eigenvalue(int l) const {
    return static_cast<std::int64_t>(l) * (l + n - 2);
  }
  std::int64_t angular_eigenvalue() const { return angular_eigenvalue(ell); }
  cplx alpha_eff(double r) const { return alpha * smooth_cutoff(r); }
  /// Short-range potential, identically zero beyond r_match.
  cplx V(double r) const { return r >= r_match ? cplx(0.0) : potential(r); }
  bool is_real() const;
  std::string hash() const;
};

/// Smallest radius (>= 2) beyond which sup |r^{2+delta} V| < tol * r^delta on a fine scan.
double find_r_match(const RadialProfile& potential, double delta, double tol);

bool alpha_admissible(int n, cplx alpha);

/// Taylor data of r a(r) and r^2 b(r) at the origin, valid for r < radius.
struct OriginSeries {
  std::vector<cplx> ra;
  std::vector<cplx> r2b;
  double radius = 1.0;
};

/// Far-field (r >= r_match) operator: r a = (n-1) + 2 i sigma r,
/// r^2 b = q0 - i sigma (n-1+2S) r, with q0 = l(l+n-2) + alpha.
struct FarField {
  int n = 3;
  cplx q0 = 0.0;
  cplx sigma = 0.0;
  cplx S = 0.0;

  /// Euler (indicial) polynomial acting on r^m: m^2 + (n-2) m - q0.
  cplx euler(cplx m) const { return m * m + double(n - 2) * m - q0; }
  cplx euler_derivative(cplx m) const { return 2.0 * m + double(n - 2); }
  /// Coefficient of the first-order (sigma) shift acting on r^m.
  cplx shift(cplx m) const {
    return 2.0 * cplx(0, 1) * sigma * (m + 0.5 * double(n - 1) + S);
  }
};

class ModeCoefficients {
 public:
  ModeCoefficients(ModeModel model, int ell, cplx sigma)
      : model_(std::move(model)), ell_(ell), sigma_(sigma) {}

  cplx a(double r) const { return double(model_.n - 1) / r + 2.0 * cplx(0, 1) * sigma_; }
  cplx b(double r) const;
  /// The sigma-independent (zero-energy) part of b.
  cplx b0(double r) const;

  OriginSeries origin_series(int m) const;
  FarField far_field() const;

  const ModeModel& model() const { return model_; }
  int ell() const { return ell_; }
  cplx sigma() const { return sigma_; }

 private:
  ModeModel model_;
  int ell_;
  cplx sigma_;
};

ModeCoefficients mode_coefficients(const ModeModel& model, cplx sigma);
ModeCoefficients mode_coefficients(const ModeModel& model, int ell, cplx sigma);

/// Radii where the coefficients of the mode operator are not smooth.
std::vector<double> model_breakpoints(const ModeModel& model);

/// W_eff(r) = (nu_c(r)^2 - 1/4) / r^2 + V(r), the potential of the 1+1 reduction
/// psi = r^{(n-1)/2} u, with nu_c^2 = ((n-2)/2 + l)^2 + alpha chi(r).
std::function<cplx(double)> effective_potential(const ModeModel& model);

enum class RegionKind { Tplus, IotaPlus, ScriPlus };

struct RegionSpec {
  RegionKind kind = RegionKind::Tplus;
  double param = 10.0;  // r, q, or t_*

  void validate() const;
  /// Position of the observer at time t.
  double radius_at(double t) const;
  std::string key() const;

  static RegionSpec fixed_r(double r) { return {RegionKind::Tplus, r}; }
  static RegionSpec ray(double q) { return {RegionKind::IotaPlus, q}; }
  static RegionSpec scri(double t_star) { return {RegionKind::ScriPlus, t_star}; }
};

/// Japanese bracket sqrt(1 + x^2).
inline double jbracket(double x) { return std::sqrt(1.0 + x * x); }

double rho_T(double t, double r);
double rho_plus(double t, double r);
double rho_scri(double t, double r);

}  // namespace tailwave
