#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "tailwave/evolve.hpp"
#include "tailwave/kernels.hpp"

using namespace tailwave;

namespace {

struct Fields {
  explicit Fields(std::size_t n) : prev(n), cur(n), next(n, 0.0), W(n), work(n), work2(n) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = (double(i) + 0.5) * 0.05;
      prev[i] = std::exp(-(r - 50.0) * (r - 50.0) / 400.0);
      cur[i] = prev[i];
      W[i] = 1.0 / (r * r + 1.0);
    }
  }
  std::vector<double> prev, cur, next, W, work, work2;
};

template <KernelKind K>
void BM_leapfrog(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const int order = int(state.range(1));
  Fields f(n);
  const StencilSpec s{0.05, order};
  for (auto _ : state) {
    leapfrog_step(K, f.prev, f.cur, f.next, f.W, f.work, f.work2, n, 0.025, s);
    std::swap(f.prev, f.cur);
    std::swap(f.cur, f.next);
    benchmark::DoNotOptimize(f.cur.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(n));
}

void BM_evolve(benchmark::State& state) {
  ModeModel m;
  m.n = 3;
  m.alpha = 1.0;
  m.finalize();
  EvolutionConfig c;
  c.dr = 0.05;
  c.T_max = 400.0;
  c.kernel = state.range(0) ? KernelKind::OpenMP : KernelKind::Serial;
  c.observers = {RegionSpec::fixed_r(10.0)};
  c.data = {PulseKind::Ingoing, 5.0, 1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(run(m, c).steps);
}

}  // namespace

BENCHMARK_TEMPLATE(BM_leapfrog, KernelKind::Serial)->ArgsProduct({{1 << 12, 1 << 15, 1 << 18}, {2, 4}});
BENCHMARK_TEMPLATE(BM_leapfrog, KernelKind::OpenMP)->ArgsProduct({{1 << 12, 1 << 15, 1 << 18}, {2, 4}});
BENCHMARK(BM_evolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
