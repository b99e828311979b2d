#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tailwave {

using cplx = std::complex<double>;

/// Smooth radial cutoff: 0 for r <= 1, 1 for r >= 2, quintic smoothstep in between.
double smooth_cutoff(double r);
double smooth_cutoff_derivative(double r);

/// Natural cubic spline through tabulated (r, V) samples. Evaluation outside the
/// table raises ErrorCode::Extrapolation.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  /// Polynomial coefficients of the first segment expanded about x = front().
  std::vector<double> first_segment() const;
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::vector<double> x_, y_, m_;
};

/// A radial function r -> f(r) used both for short-range potentials and for
/// forcing terms. Families are parametric so that Taylor data at the origin
/// and power-law tails are available in closed form.
class RadialProfile {
 public:
  struct Zero {};
  struct Exponential { double mu; };        // exp(-mu r)
  struct Gauss { double width; };           // exp(-(r/w)^2)
  struct Table { CubicSpline spline; std::string path; };
  struct CutoffInverseSquare {};            // chi(r) / r^2
  struct Indicator { double lo, hi; };      // 1 on [lo, hi]
  struct Bump { double lo, hi; };           // C-infinity bump, peak 1
  struct PowerTail { cplx exponent; };      // chi(r) r^exponent

  using Family = std::variant<Zero, Exponential, Gauss, Table, CutoffInverseSquare, Indicator,
                              Bump, PowerTail>;

  RadialProfile() = default;
  RadialProfile(Family family, cplx amplitude) : family_(std::move(family)), amplitude_(amplitude) {}

  static RadialProfile none() { return {}; }
  static RadialProfile yukawa(double amplitude, double mu) { return {Exponential{mu}, amplitude}; }
  static RadialProfile gauss(double amplitude, double width) { return {Gauss{width}, amplitude}; }
  static RadialProfile table(std::vector<double> r, std::vector<double> v, std::string path = {});
  static RadialProfile cutoff_inverse_square(double amplitude) {
    return {CutoffInverseSquare{}, amplitude};
  }
  static RadialProfile indicator(double lo, double hi, double amplitude = 1.0) {
    return {Indicator{lo, hi}, amplitude};
  }
  static RadialProfile bump(double lo, double hi, double amplitude = 1.0) {
    return {Bump{lo, hi}, amplitude};
  }
  static RadialProfile power_tail(cplx coefficient, cplx exponent) {
    return {PowerTail{exponent}, coefficient};
  }

  cplx operator()(double r) const;
  RadialProfile scaled(cplx factor) const { return {family_, amplitude_ * factor}; }

  bool is_zero() const;
  bool is_real() const;
  /// Taylor coefficients at r = 0 (m terms), valid on [0, taylor_radius()).
  std::vector<cplx> taylor(int m) const;
  double taylor_radius() const;
  /// Points where the profile or one of its low derivatives jumps.
  std::vector<double> breakpoints() const;
  /// Radius beyond which the profile is identically zero (infinity if none).
  double support_end() const;
  /// Exact power law c r^p valid for r >= 2, if the family is one.
  std::optional<std::pair<cplx, cplx>> power_law_tail() const;

  const Family& family() const { return family_; }
  cplx amplitude() const { return amplitude_; }
  /// Config syntax, e.g. "gauss(-2.5,1)".
  std::string describe() const;

 private:
  Family family_ = Zero{};
  cplx amplitude_ = 1.0;
};

/// Parse "none", "yukawa(A,mu)", "gauss(A,w)", "table(path)", "bump(a,b)",
/// "indicator(a,b)" or "cutoff_inverse_square(A)".
RadialProfile parse_profile(const std::string& text);

}  // namespace tailwave
