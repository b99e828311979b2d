#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace tailwave {

enum class KernelKind { Serial, OpenMP };

/// Offset grid r_i = (i + 1/2) dr, odd extension at r = 0, zero beyond the last point.
/// Only the first `active` entries of the inputs may be nonzero.
struct StencilSpec {
  double dr = 0.05;
  int order = 4;  // 2 or 4
};

/// Stencil half-width of the second-difference operator.
inline std::size_t stencil_reach(int order) { return order == 4 ? 2 : 1; }
/// Points gained by one full leapfrog step.
inline std::size_t step_reach(int order) { return order == 4 ? 4 : 1; }

/// out[i] = (D2 psi)_i - W_i psi_i for i < count.
void apply_operator_serial(std::span<const double> psi, std::span<const double> W, std::span<double> out,
                           std::size_t count, const StencilSpec& s);
void apply_operator_omp(std::span<const double> psi, std::span<const double> W, std::span<double> out,
                        std::size_t count, const StencilSpec& s);

/// next = 2 cur - prev + dt^2 L cur (+ dt^4/12 L^2 cur for order 4) on [0, count).
/// `work` holds L cur on return; `work2` holds L^2 cur for order 4.
void leapfrog_step_serial(std::span<const double> prev, std::span<const double> cur, std::span<double> next,
                          std::span<const double> W, std::span<double> work, std::span<double> work2,
                          std::size_t count, double dt, const StencilSpec& s);
void leapfrog_step_omp(std::span<const double> prev, std::span<const double> cur, std::span<double> next,
                       std::span<const double> W, std::span<double> work, std::span<double> work2,
                       std::size_t count, double dt, const StencilSpec& s);

inline void leapfrog_step(KernelKind k, std::span<const double> prev, std::span<const double> cur,
                          std::span<double> next, std::span<const double> W, std::span<double> work,
                          std::span<double> work2, std::size_t count, double dt, const StencilSpec& s) {
  if (k == KernelKind::Serial)
    leapfrog_step_serial(prev, cur, next, W, work, work2, count, dt, s);
  else
    leapfrog_step_omp(prev, cur, next, W, work, work2, count, dt, s);
}

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      c_ += (sum_ - t) + x;
    else
      c_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0, c_ = 0.0;
};

void set_thread_count(int n);
int thread_count();

}  // namespace tailwave
