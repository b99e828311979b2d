#include "tailwave/kernels.hpp"

#include <algorithm>

#include <omp.h>

namespace tailwave {

namespace {

// Second difference at i with the odd ghost psi(-r) = -psi(r) and zeros past the end.
inline double d2_edge(const double* p, long i, long n, int order) {
  auto at = [&](long j) { return j < 0 ? -p[-j - 1] : (j >= n ? 0.0 : p[j]); };
  if (order == 4)
    return (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * p[i] + 16.0 * at(i + 1) - at(i + 2)) * (1.0 / 12.0);
  return at(i - 1) - 2.0 * p[i] + at(i + 1);
}

inline double d2_inner(const double* p, long i, int order) {
  if (order == 4) return (-p[i - 2] + 16.0 * p[i - 1] - 30.0 * p[i] + 16.0 * p[i + 1] - p[i + 2]) * (1.0 / 12.0);
  return p[i - 1] - 2.0 * p[i] + p[i + 1];
}

inline double op_at(const double* p, const double* W, long i, long n, int order, long reach, double inv_h2) {
  const double d2 = (i >= reach && i + reach < n) ? d2_inner(p, i, order) : d2_edge(p, i, n, order);
  return d2 * inv_h2 - W[i] * p[i];
}

inline double combine(double prev, double cur, double l1, double l2, double dt2, bool fourth) {
  const double acc = fourth ? l1 + (dt2 / 12.0) * l2 : l1;
  return 2.0 * cur - prev + dt2 * acc;
}

}  // namespace

void apply_operator_serial(std::span<const double> psi, std::span<const double> W, std::span<double> out,
                           std::size_t count, const StencilSpec& s) {
  const long n = long(psi.size());
  const long reach = long(stencil_reach(s.order));
  const double inv = 1.0 / (s.dr * s.dr);
  const long m = std::min<long>(long(count), n);
  for (long i = 0; i < m; ++i) out[std::size_t(i)] = op_at(psi.data(), W.data(), i, n, s.order, reach, inv);
}

void apply_operator_omp(std::span<const double> psi, std::span<const double> W, std::span<double> out,
                        std::size_t count, const StencilSpec& s) {
  const long n = long(psi.size());
  const long reach = long(stencil_reach(s.order));
  const double inv = 1.0 / (s.dr * s.dr);
  const long m = std::min<long>(long(count), n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) out[std::size_t(i)] = op_at(psi.data(), W.data(), i, n, s.order, reach, inv);
}

void leapfrog_step_serial(std::span<const double> prev, std::span<const double> cur, std::span<double> next,
                          std::span<const double> W, std::span<double> work, std::span<double> work2,
                          std::size_t count, double dt, const StencilSpec& s) {
  const long n = long(cur.size());
  const long m = std::min<long>(long(count), n);
  const double dt2 = dt * dt;
  const bool fourth = s.order == 4;
  if (fourth) {
    const long m1 = std::min<long>(m + 2, n);
    apply_operator_serial(cur, W, work, std::size_t(m1), s);
    apply_operator_serial(work, W, work2, std::size_t(m), s);
  } else {
    apply_operator_serial(cur, W, work, std::size_t(m), s);
  }
  for (long i = 0; i < m; ++i) {
    const std::size_t k = std::size_t(i);
    next[k] = combine(prev[k], cur[k], work[k], fourth ? work2[k] : 0.0, dt2, fourth);
  }
}

void leapfrog_step_omp(std::span<const double> prev, std::span<const double> cur, std::span<double> next,
                       std::span<const double> W, std::span<double> work, std::span<double> work2,
                       std::size_t count, double dt, const StencilSpec& s) {
  const long n = long(cur.size());
  const long m = std::min<long>(long(count), n);
  const double dt2 = dt * dt;
  const bool fourth = s.order == 4;
  const long reach = long(stencil_reach(s.order));
  const double inv = 1.0 / (s.dr * s.dr);
  const long m1 = fourth ? std::min<long>(m + 2, n) : m;
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (long i = 0; i < m1; ++i) work[std::size_t(i)] = op_at(cur.data(), W.data(), i, n, s.order, reach, inv);
    if (fourth) {
#pragma omp for schedule(static)
      for (long i = 0; i < m; ++i) work2[std::size_t(i)] = op_at(work.data(), W.data(), i, n, s.order, reach, inv);
    }
#pragma omp for schedule(static)
    for (long i = 0; i < m; ++i) {
      const std::size_t k = std::size_t(i);
      next[k] = combine(prev[k], cur[k], work[k], fourth ? work2[k] : 0.0, dt2, fourth);
    }
  }
}

void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace tailwave
