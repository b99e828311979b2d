#include "doctest.h"
#include "support.hpp"
#include "tailwave/errors.hpp"
#include "tailwave/indicial.hpp"
#include "tailwave/model.hpp"

using namespace tailwave;
using tw_test::make_model;

namespace {
const cplx I(0.0, 1.0);

bool throws_code(auto&& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}
}  // namespace

TEST_CASE("mode coefficients of the flat mode operator") {
  const auto m = make_model(3, 0.0);
  for (double r : {0.3, 1.0, 7.5}) {
    const auto c0 = mode_coefficients(m, 0.0);
    CHECK(std::abs(c0.a(r) - 2.0 / r) < 1e-15);
    CHECK(std::abs(c0.b(r)) < 1e-15);
    const auto c1 = mode_coefficients(m, 1.0);
    CHECK(std::abs(c1.a(r) - (2.0 / r + 2.0 * I)) < 1e-15);
    CHECK(std::abs(c1.b(r) - (-2.0 * I / r)) < 1e-15);
    const auto l1 = mode_coefficients(m, 1, 0.0);
    CHECK(std::abs(l1.b(r) - 2.0 / (r * r)) < 1e-14);
  }
}

TEST_CASE("coefficients are affine in sigma with the zero-energy part as intercept") {
  auto m = make_model(4, cplx(0.7, 0.2), 1, RadialProfile::yukawa(0.5, 1.0));
  m.S = cplx(0.1, -0.3);
  for (cplx sigma : {cplx(1.0), cplx(0.5, 0.3), cplx(-2.0, 1.0)}) {
    const auto c = mode_coefficients(m, 1, sigma);
    const auto z = mode_coefficients(m, 1, 0.0);
    for (double r : {0.2, 1.5, 3.0, 12.0}) {
      CHECK(std::abs(c.a(r) - 2.0 * I * sigma - z.a(r)) < 1e-13);
      const cplx shift = -I * sigma * double(m.n - 1) / r - 2.0 * I * sigma * m.S / r;
      CHECK(std::abs(c.b(r) - shift - z.b(r)) < 1e-13);
      CHECK(std::abs(c.b0(r) - z.b(r)) < 1e-13);
    }
  }
}

TEST_CASE("effective potential closed forms") {
  const auto w0 = effective_potential(make_model(3, 0.0));
  const auto w1 = effective_potential(make_model(3, 1.0));
  const auto w4 = effective_potential(make_model(4, 0.0));
  for (double r : {0.5, 2.0, 3.0, 40.0}) {
    CHECK(std::abs(w0(r)) < 1e-15);
    CHECK(std::abs(w4(r) - 0.75 / (r * r)) < 1e-14);
  }
  for (double r : {2.0, 3.0, 40.0}) CHECK(std::abs(w1(r) - 1.0 / (r * r)) < 1e-14);
  // the inverse-square part is switched off at the origin
  CHECK(std::abs(w1(0.5)) < 1e-15);
}

TEST_CASE("far-field effective potential reproduces nu_0 (random property)") {
  for (int trial = 0; trial < 100; ++trial) {
    const int n = tw_test::uniform_int(3, 7);
    const int ell = tw_test::uniform_int(0, 4);
    const double edge = 0.25 * double(n - 2) * double(n - 2);
    const cplx alpha(tw_test::uniform(-0.95 * edge, 3.0), trial % 2 ? tw_test::uniform(-1.0, 1.0) : 0.0);
    const auto m = make_model(n, alpha, ell);
    const double r = 1e3;
    const cplx nu = nu_ell(n, alpha, ell);
    const cplx lam_l = double(m.angular_eigenvalue(ell));
    // lambda_l + alpha + (n-1)(n-3)/4 = nu_l^2 - 1/4
    CHECK(std::abs(lam_l + alpha + 0.25 * double((n - 1) * (n - 3)) - (nu * nu - 0.25)) < 1e-12);
    CHECK(std::abs(r * r * effective_potential(m.with_ell(ell))(r) - (nu * nu - 0.25)) < 1e-10);
  }
}

TEST_CASE("angular eigenvalue is exact integer arithmetic") {
  ModeModel m;
  m.n = 5;
  CHECK(m.angular_eigenvalue(0) == 0);
  CHECK(m.angular_eigenvalue(3) == 3 * (3 + 3));
  m.n = 3;
  CHECK(m.angular_eigenvalue(100000) == std::int64_t(100000) * 100001);
}

TEST_CASE("alpha admissibility") {
  CHECK(alpha_admissible(3, 0.0));
  CHECK(alpha_admissible(3, -0.2));
  CHECK_FALSE(alpha_admissible(3, -0.25));
  CHECK_FALSE(alpha_admissible(3, -1.0));
  CHECK(alpha_admissible(3, cplx(-1.0, 1e-3)));
  CHECK(throws_code([] { make_model(4, -1.5); }, ErrorCode::InadmissibleAlpha));
  CHECK(throws_code([] { make_model(0, 0.0); }, ErrorCode::InvalidModel));
}

TEST_CASE("r_match makes the short-range potential negligible") {
  const auto m = make_model(3, 0.0, 0, RadialProfile::yukawa(2.0, 1.0));
  CHECK(m.r_match >= 2.0);
  for (double r = m.r_match; r < 4.0 * m.r_match; r *= 1.01)
    CHECK(std::abs(std::pow(r, 2.0 + m.delta) * m.potential(r)) < m.match_tol * std::pow(m.r_match, m.delta));
  CHECK(m.V(m.r_match * 1.5) == cplx(0.0));
}

TEST_CASE("non-stationary perturbation lies in the decay class") {
  NonstatPerturbation p;
  p.eps = 0.1;
  p.delta_t = 1.0;
  double worst = 0.0;
  for (double t = 1.0; t < 2000.0; t *= 1.3)
    for (double r = 0.1; r < 1.5 * t; r *= 1.2) worst = std::max(worst, p.class_ratio(t, r, 1.0));
  CHECK(worst < 10.0);
}

TEST_CASE("region specs") {
  CHECK(RegionSpec::fixed_r(10).key() == "r_10");
  CHECK(RegionSpec::ray(0.5).key() == "ray_0.5");
  CHECK(RegionSpec::scri(50).key() == "scri_50");
  CHECK(RegionSpec::ray(0.5).radius_at(100.0) == doctest::Approx(50.0));
  CHECK(RegionSpec::scri(50).radius_at(300.0) == doctest::Approx(250.0));
  CHECK(throws_code([] { RegionSpec::ray(1.0).validate(); }, ErrorCode::ConfigInvalid));
  CHECK(throws_code([] { RegionSpec::fixed_r(0.0).validate(); }, ErrorCode::ConfigInvalid));
  for (double t : {10.0, 100.0, 1000.0})
    for (double r : {0.0, 5.0, 0.5 * t, t, 2.0 * t}) {
      CHECK(rho_T(t, r) > 0.0);
      CHECK(rho_plus(t, r) > 0.0);
      CHECK(rho_scri(t, r) > 0.0);
    }
}

TEST_CASE("tabulated potentials interpolate and refuse to extrapolate") {
  std::vector<double> r, v;
  for (int i = 0; i <= 200; ++i) {
    r.push_back(0.05 * i);
    v.push_back(std::exp(-r.back()));
  }
  const auto p = RadialProfile::table(r, v);
  CHECK(std::abs(p(1.234) - std::exp(-1.234)) < 1e-6);
  CHECK(throws_code([&] { (void)p(11.0); }, ErrorCode::Extrapolation));
}

TEST_CASE("profile syntax round-trips") {
  for (const char* s : {"none", "yukawa(2,1)", "gauss(-2.5,1)", "bump(1,2,1)", "indicator(1,2,1)",
                        "cutoff_inverse_square(1)"}) {
    const auto p = parse_profile(s);
    const auto q = parse_profile(p.describe());
    for (double r : {0.3, 1.2, 1.7, 4.0}) CHECK(p(r) == q(r));
  }
}

TEST_CASE("model hash distinguishes parameters") {
  const auto a = make_model(3, 1.0);
  const auto b = make_model(3, 1.0 + 1e-12);
  const auto c = make_model(3, 1.0, 1);
  CHECK(a.hash() == make_model(3, 1.0).hash());
  CHECK(a.hash() != b.hash());
  CHECK(a.hash() != c.hash());
}
