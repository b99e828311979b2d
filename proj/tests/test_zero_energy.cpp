#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "tailwave/errors.hpp"
#include "tailwave/indicial.hpp"
#include "tailwave/zero_energy.hpp"

using namespace tailwave;
using tw_test::make_model;

namespace {

// Plain RK4 shooting for -u'' - (2/r) u' + V u = 0 from the regular origin; returns
// c^- = u + r u' at r = R (exact for u = c^- + c^+/r beyond the potential).
double shoot_c_minus(double c, double R, int steps) {
  auto V = [c](double r) { return -c * std::exp(-r * r); };
  double r = 1e-4, u = 1.0 + V(0.0) * r * r / 6.0, du = V(0.0) * r / 3.0;
  const double h = (R - r) / steps;
  auto rhs = [&](double x, double y, double dy, double& a, double& b) {
    a = dy;
    b = -2.0 / x * dy + V(x) * y;
  };
  for (int i = 0; i < steps; ++i) {
    double k1, l1, k2, l2, k3, l3, k4, l4;
    rhs(r, u, du, k1, l1);
    rhs(r + h / 2, u + h / 2 * k1, du + h / 2 * l1, k2, l2);
    rhs(r + h / 2, u + h / 2 * k2, du + h / 2 * l2, k3, l3);
    rhs(r + h, u + h * k3, du + h * l3, k4, l4);
    u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    du += h / 6 * (l1 + 2 * l2 + 2 * l3 + l4);
    r += h;
  }
  return u + r * du;
}

double bisect_oracle(double lo, double hi, int steps) {
  double flo = shoot_c_minus(lo, 8.0, steps);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = shoot_c_minus(mid, 8.0, steps);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool throws_code(auto&& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

double simpson(auto&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("free resonance indicator") {
  CHECK(std::abs(resonance_indicator(make_model(3, 0.0), 0) - 1.0) < 1e-10);
  CHECK(std::abs(resonance_indicator(make_model(3, 0.0), 1) - 1.0) < 1e-10);
  const auto c = zero_energy_connection(make_model(3, 0.0), 0);
  CHECK(std::abs(c.c_plus) < 1e-10);
}

TEST_CASE("Gaussian well resonance threshold against a shooting oracle") {
  const auto base = make_model(3, 0.0);
  ZeroEnergyOptions a, b;
  a.tol = 1e-10;
  b.tol = 1e-12;
  const auto ra = resonance_crossing(base, 0, "gauss", 1.0, 4.0, a);
  const auto rb = resonance_crossing(base, 0, "gauss", 1.0, 4.0, b);
  CHECK(ra.c_star > 1.0);
  CHECK(ra.c_star < 4.0);
  CHECK(std::abs(ra.c_star - rb.c_star) < 1e-6);
  const double o1 = bisect_oracle(1.0, 4.0, 20000);
  const double o2 = bisect_oracle(1.0, 4.0, 40000);
  CHECK(std::abs(o1 - o2) < 1e-8);
  CHECK(std::abs(ra.c_star - o2) < 1e-6);

  // at threshold the zero-energy solve refuses
  auto m = base;
  m.potential = RadialProfile::gauss(-ra.c_star, 1.0);
  m.r_match = 0.0;
  m.finalize();
  CHECK(std::abs(resonance_indicator(m, 0)) < 1e-7);
  CHECK(throws_code([&] { solve_zero_energy(m, 0, RadialProfile::bump(1, 2)); }, ErrorCode::ResonanceDetected));
}

TEST_CASE("resonance bracket must change sign") {
  CHECK(throws_code([] { resonance_crossing(make_model(3, 0.0), 0, "gauss", 0.1, 0.5); }, ErrorCode::FitInvalid));
  CHECK(throws_code([] { resonance_crossing(make_model(3, 0.0), 0, "square", 1, 4); }, ErrorCode::ConfigInvalid));
}

TEST_CASE("flat solve with indicator forcing") {
  const auto u = solve_zero_energy(make_model(3, 0.0), 0, RadialProfile::indicator(1.0, 2.0));
  for (double r : {2.0, 2.5, 5.0, 10.0, 50.0}) CHECK(std::abs(u.interpolate(r).u - 7.0 / (3.0 * r)) < 1e-8);
  // u = 2 - r^2/6 - 1/(3r) on [1, 2], constant below
  CHECK(std::abs(u.interpolate(1.5).u - (2.0 - 2.25 / 6.0 - 1.0 / 4.5)) < 1e-8);
  for (double r : {0.2, 0.7}) CHECK(std::abs(u.interpolate(r).u - 1.5) < 1e-8);
}

TEST_CASE("zero forcing gives zero") {
  const auto u = solve_zero_energy(make_model(3, 1.0), 0, RadialProfile::none());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u.value(i)) == 0.0);
}

TEST_CASE("inverse-square tail exponent") {
  const auto m = make_model(3, 1.0);
  const auto u = solve_zero_energy(m, 0, RadialProfile::bump(1.0, 2.0));
  const double lp = 0.5 + std::sqrt(5.0) / 2.0;
  const std::size_t j = u.size() - 1, i = j - 10;
  const double slope = -std::log(std::abs(u.value(j) / u.value(i))) / std::log(u.r[j] / u.r[i]);
  CHECK(std::abs(slope - lp) < 1e-6);
  REQUIRE(u.connection.has_value());
  CHECK(std::abs(u.connection->c_minus) < 1e-8 * std::abs(u.connection->c_plus));
}

TEST_CASE("residual of the zero-energy solve (several potentials)") {
  const std::vector<ModeModel> models{make_model(3, 0.0, 0, RadialProfile::yukawa(0.5, 1.0)),
                                      make_model(3, 1.0), make_model(4, 0.0, 1),
                                      make_model(3, -0.2, 0, RadialProfile::gauss(1.0, 1.0))};
  for (const auto& m : models) {
    const auto f = RadialProfile::bump(1.0, 3.0);
    const auto grid = uniform_grid(0.05, 30.0, 0.001);
    const auto u = solve_zero_energy(m, m.ell, f, grid);
    OdeSystem sys = make_system(mode_coefficients(m, m.ell, 0.0));
    sys.f = [&](double r) { return f(r); };
    const double lm = indicial_roots(m, m.ell).lambda_minus[std::size_t(m.ell)].real();
    auto w = [&](double r) { return std::pow(1.0 + r, lm + 2.0); };
    double fnorm = 0.0;
    for (double r : grid) fnorm = std::max(fnorm, w(r) * std::abs(f(r)));
    CHECK(ode_residual(sys, u, model_breakpoints(m), w) < 1e-7 * fnorm);
  }
}

TEST_CASE("real data give real solutions") {
  const auto m = make_model(3, 0.7, 0, RadialProfile::yukawa(0.5, 1.0));
  const auto u = solve_zero_energy(m, 0, RadialProfile::bump(1.0, 2.5));
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u.value(i).imag()) <= 1e-12 * std::abs(u.value(i)) + 1e-300);
}

TEST_CASE("Green's identity for the real zero-energy operator") {
  for (const auto& m : {make_model(3, 0.0, 0, RadialProfile::yukawa(0.5, 1.0)), make_model(3, 1.0)}) {
    const auto f = RadialProfile::bump(1.0, 2.0);
    const auto g = RadialProfile::bump(1.5, 3.0);
    const auto uf = solve_zero_energy(m, 0, f);
    const auto ug = solve_zero_energy(m, 0, g);
    const double lhs = simpson([&](double r) { return (uf.interpolate(r).u * g(r)).real() * r * r; }, 1.5, 3.0, 4000);
    const double rhs = simpson([&](double r) { return (ug.interpolate(r).u * f(r)).real() * r * r; }, 1.0, 2.0, 4000);
    CHECK(std::abs(lhs - rhs) < 1e-7 * std::abs(lhs));
  }
}

TEST_CASE("large zero-energy state") {
  const auto flat = large_zero_state(make_model(3, 0.0));
  for (std::size_t i = 0; i < flat.size(); i += 7) CHECK(std::abs(flat.value(i) - 1.0) < 1e-10);

  const auto m = make_model(3, 0.0, 0, RadialProfile::yukawa(0.5, 1.0));
  const auto a = large_zero_state(m);
  CHECK(std::abs(a.value(0) - 1.0) > 1e-3);
  const auto c = zero_energy_connection(m, 0);
  // a_T = 1 + (c^+/c^-)/r beyond the potential
  const cplx ratio = c.c_plus / c.c_minus;
  CHECK(std::abs(a.interpolate(50.0).u - (1.0 + ratio / 50.0)) < 1e-4);
  REQUIRE(a.connection.has_value());
  CHECK(std::abs(a.connection->c_minus - 1.0) < 1e-10);
}

TEST_CASE("large zero-energy state normalization with lambda^- != 0") {
  const auto m = make_model(3, 1.0);
  const auto a = large_zero_state(m);
  const double lm = 0.5 - std::sqrt(5.0) / 2.0;
  const double r = a.r.back();
  CHECK(std::abs(a.value(a.size() - 1) * std::pow(r, lm) - 1.0) < 1e-3);
  REQUIRE(a.connection.has_value());
  CHECK(std::abs(a.connection->c_minus - 1.0) < 1e-10);
}
