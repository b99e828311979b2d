#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "tailwave/kernels.hpp"

using namespace tailwave;

namespace {
std::vector<double> random_field(std::size_t n, std::size_t active) {
  std::vector<double> v(n, 0.0);
  for (std::size_t i = 0; i < active; ++i) v[i] = tw_test::uniform(-1.0, 1.0);
  return v;
}
}  // namespace

TEST_CASE("operator kernels: OpenMP matches serial bitwise") {
  for (int order : {2, 4}) {
    for (int threads : {1, 2, 4}) {
      set_thread_count(threads);
      const std::size_t N = 5000, active = 4000;
      const auto psi = random_field(N, active);
      std::vector<double> W(N);
      for (auto& w : W) w = tw_test::uniform(0.0, 2.0);
      std::vector<double> a(N, 0.0), b(N, 0.0);
      const StencilSpec s{0.05, order};
      apply_operator_serial(psi, W, a, active + 2, s);
      apply_operator_omp(psi, W, b, active + 2, s);
      CHECK(a == b);
    }
  }
  set_thread_count(0);
}

TEST_CASE("leapfrog kernels: OpenMP matches serial bitwise over many steps") {
  for (int order : {2, 4}) {
    set_thread_count(3);
    const std::size_t N = 3000;
    const StencilSpec s{0.1, order};
    std::vector<double> W(N);
    for (std::size_t i = 0; i < N; ++i) W[i] = 1.0 / ((i + 0.5) * (i + 0.5) * 0.01 + 1.0);
    auto p1 = random_field(N, 500), c1 = random_field(N, 500);
    auto p2 = p1, c2 = c1;
    std::vector<double> n1(N, 0.0), n2(N, 0.0), w1(N), w2(N), x1(N), x2(N);
    std::size_t count = 500;
    for (int step = 0; step < 300; ++step) {
      count = std::min(N, count + step_reach(order));
      leapfrog_step_serial(p1, c1, n1, W, w1, x1, count, 0.05, s);
      leapfrog_step_omp(p2, c2, n2, W, w2, x2, count, 0.05, s);
      std::swap(p1, c1);
      std::swap(c1, n1);
      std::swap(p2, c2);
      std::swap(c2, n2);
    }
    CHECK(c1 == c2);
    CHECK(p1 == p2);
  }
  set_thread_count(0);
}

TEST_CASE("second difference is exact on quadratics away from the origin") {
  const std::size_t N = 200;
  const double dr = 0.1;
  std::vector<double> psi(N), W(N, 0.0), out(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double r = (double(i) + 0.5) * dr;
    psi[i] = 3.0 * r * r - r + 2.0;
  }
  for (int order : {2, 4}) {
    apply_operator_serial(psi, W, out, N - 3, StencilSpec{dr, order});
    for (std::size_t i = 3; i < N - 3; ++i) CHECK(out[i] == doctest::Approx(6.0).epsilon(1e-9));
  }
}

TEST_CASE("fourth-order stencil is exact on quartics") {
  const std::size_t N = 100;
  const double dr = 0.05;
  std::vector<double> psi(N), W(N, 0.0), out(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double r = (double(i) + 0.5) * dr;
    psi[i] = r * r * r * r;
  }
  apply_operator_serial(psi, W, out, N - 3, StencilSpec{dr, 4});
  for (std::size_t i = 3; i < N - 3; ++i) {
    const double r = (double(i) + 0.5) * dr;
    CHECK(std::abs(out[i] - 12.0 * r * r) < 1e-8);
  }
}

TEST_CASE("odd extension: the operator is symmetric") {
  const std::size_t N = 40;
  for (int order : {2, 4}) {
    const StencilSpec s{0.1, order};
    std::vector<double> W(N, 0.3);
    std::vector<std::vector<double>> M(N, std::vector<double>(N));
    for (std::size_t j = 0; j < N; ++j) {
      std::vector<double> e(N, 0.0), out(N, 0.0);
      e[j] = 1.0;
      apply_operator_serial(e, W, out, N, s);
      for (std::size_t i = 0; i < N; ++i) M[i][j] = out[i];
    }
    double asym = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) asym = std::max(asym, std::abs(M[i][j] - M[j][i]));
    CHECK(asym < 1e-12);
  }
}

TEST_CASE("compensated sum") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}
