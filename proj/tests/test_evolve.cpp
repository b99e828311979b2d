#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "tailwave/errors.hpp"
#include "tailwave/evolve.hpp"

using namespace tailwave;
using tw_test::make_model;

namespace {
bool throws_code(auto&& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

EvolutionConfig base_config(PulseKind kind, double center, double T) {
  EvolutionConfig c;
  c.dr = 0.05;
  c.cfl = 0.5;
  c.T_max = T;
  c.order = 4;
  c.data = {kind, center, 1.0, 1.0};
  return c;
}

// u at fixed r from an Evolver driven by hand.
std::vector<double> trace(Evolver& ev, double r, double T) {
  std::vector<double> out;
  while (ev.time() < T - 1e-12) {
    ev.step();
    out.push_back(*ev.psi_at(r));
  }
  return out;
}
}  // namespace

TEST_CASE("strong Huygens in three dimensions") {
  auto cfg = base_config(PulseKind::TimeSymmetric, 5.0, 120.0);
  cfg.observers = {RegionSpec::fixed_r(10.0)};
  const auto h = run(make_model(3, 0.0), cfg);
  const auto [t, u] = sample(h, RegionSpec::fixed_r(10.0));
  double peak = 0.0, late = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    peak = std::max(peak, std::abs(u[i]));
    if (t[i] > 40.0) late = std::max(late, std::abs(u[i]));
  }
  CHECK(peak > 0.01);
  CHECK(late < 1e-9 * cfg.data.amplitude);
}

TEST_CASE("outgoing transport without effective potential") {
  auto cfg = base_config(PulseKind::Outgoing, 20.0, 10.0);
  cfg.dr = 0.025;
  Evolver ev(make_model(3, 0.0), cfg, 60.0);
  while (ev.time() < 10.0 - 1e-12) ev.step();
  const double t = ev.time();
  double err = 0.0;
  for (double r = 15.0; r < 45.0; r += 0.1) {
    const double x = (r - t - 20.0);
    err = std::max(err, std::abs(*ev.psi_at(r) - std::exp(-x * x)));
  }
  // cubic sampling plus order-4 stencil
  CHECK(err < 1e-5);
}

TEST_CASE("discrete energy is conserved") {
  auto cfg = base_config(PulseKind::Ingoing, 10.0, 1.0);
  cfg.dr = 0.05;
  Evolver ev(make_model(4, 0.0), cfg, 30.0);
  const double e0 = ev.energy();
  CHECK(e0 > 0.0);
  double worst = 0.0;
  for (long s = 0; s < 100000; ++s) {
    ev.step();
    if (s % 1000 == 0) worst = std::max(worst, std::abs(ev.energy() - e0) / e0);
  }
  worst = std::max(worst, std::abs(ev.energy() - e0) / e0);
  CHECK(worst < 1e-6);
}

TEST_CASE("zero data has zero energy") {
  auto cfg = base_config(PulseKind::Ingoing, 10.0, 10.0);
  cfg.data.amplitude = 0.0;
  Evolver ev(make_model(3, 1.0), cfg);
  CHECK(ev.energy() == 0.0);
  for (int i = 0; i < 50; ++i) ev.step();
  CHECK(ev.energy() == 0.0);
  CHECK(ev.sup_norm() == 0.0);
}

TEST_CASE("CFL violation is detected") {
  auto cfg = base_config(PulseKind::TimeSymmetric, 10.0, 0.0);
  cfg.cfl = 1.2;
  cfg.order = 2;
  cfg.dr = 0.1;
  cfg.T_max = 200.0 * cfg.dt();
  cfg.observers = {RegionSpec::fixed_r(5.0)};
  CHECK(throws_code([&] { run(make_model(3, 0.0), cfg); }, ErrorCode::UnstableCFL));
  // and the stable counterpart runs
  cfg.cfl = 0.5;
  cfg.T_max = 200.0 * cfg.dt();
  CHECK_NOTHROW(run(make_model(3, 0.0), cfg));
}

TEST_CASE("linearity in the amplitude") {
  auto cfg = base_config(PulseKind::Ingoing, 8.0, 60.0);
  cfg.observers = {RegionSpec::fixed_r(10.0), RegionSpec::ray(0.5)};
  const auto m = make_model(3, 1.0);
  const auto a = run(m, cfg);
  cfg.data.amplitude = 2.0;
  const auto b = run(m, cfg);
  for (std::size_t k = 0; k < a.observers.size(); ++k) {
    const auto& x = a.observers[k].value;
    const auto& y = b.observers[k].value;
    REQUIRE(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - 2.0 * x[i]) <= 1e-13 * std::abs(2.0 * x[i]));
  }
}

TEST_CASE("outer boundary never reaches the samples") {
  auto cfg = base_config(PulseKind::TimeSymmetric, 5.0, 80.0);
  cfg.observers = {RegionSpec::fixed_r(10.0)};
  const auto m = make_model(3, 1.0);
  Evolver a(m, cfg), b(m, cfg, cfg.R_max() + 50.0);
  const auto ta = trace(a, 10.0, cfg.T_max);
  const auto tb = trace(b, 10.0, cfg.T_max);
  REQUIRE(ta.size() == tb.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) worst = std::max(worst, std::abs(ta[i] - tb[i]));
  CHECK(worst <= 1e-13);
}

TEST_CASE("observer bookkeeping") {
  auto cfg = base_config(PulseKind::Ingoing, 5.0, 40.0);
  cfg.observers = {RegionSpec::fixed_r(10.0), RegionSpec::scri(10.0)};
  cfg.sample_every = 2;
  const auto h = run(make_model(3, 0.0), cfg);
  CHECK(throws_code([&] { sample(h, RegionSpec::ray(0.3)); }, ErrorCode::ObserverMissing));
  const auto [t, u] = sample(h, RegionSpec::fixed_r(10.0));
  REQUIRE(t.size() > 10);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
  CHECK(t[1] - t[0] == doctest::Approx(2.0 * cfg.dt()));
  CHECK(h.floor <= cfg.data.amplitude * std::pow(cfg.dr, cfg.order));
  CHECK(h.R_max == doctest::Approx(cfg.R_max()));
  // scri observers start once t - t_* > 0
  const auto [ts, ps] = sample(h, RegionSpec::scri(10.0));
  CHECK(ts.front() > 10.0);
}

TEST_CASE("derived outer radius") {
  auto cfg = base_config(PulseKind::Ingoing, 5.0, 100.0);
  cfg.observers = {RegionSpec::fixed_r(10.0), RegionSpec::ray(0.5)};
  CHECK(cfg.R_max() == doctest::Approx(0.5 * (100.0 + 50.0) + 5.0 + 5.0 + 0.5));
}

TEST_CASE("configuration validation") {
  const auto m = make_model(3, 0.0);
  auto bad = [&](auto&& mutate) {
    auto cfg = base_config(PulseKind::Ingoing, 5.0, 10.0);
    mutate(cfg);
    return throws_code([&] { run(m, cfg); }, ErrorCode::ConfigInvalid);
  };
  CHECK(bad([](EvolutionConfig& c) { c.dr = -1.0; }));
  CHECK(bad([](EvolutionConfig& c) { c.order = 3; }));
  CHECK(bad([](EvolutionConfig& c) { c.T_max = 0.0; }));
  CHECK(bad([](EvolutionConfig& c) { c.data.width = 0.0; }));
  CHECK(bad([](EvolutionConfig& c) { c.observers = {RegionSpec::ray(1.5)}; }));
  auto cfg = base_config(PulseKind::Ingoing, 5.0, 10.0);
  CHECK(throws_code([&] { run(make_model(3, cplx(1.0, 0.5)), cfg); }, ErrorCode::ConfigInvalid));
}

TEST_CASE("ray samples converge under refinement") {
  const auto m = make_model(3, 1.0);
  auto cfg = base_config(PulseKind::Ingoing, 5.0, 60.0);
  cfg.observers = {RegionSpec::ray(0.5)};
  cfg.dr = 0.1;
  const auto coarse = run(m, cfg);
  cfg.dr = 0.05;
  cfg.sample_every = 2;
  const auto fine = run(m, cfg);
  const auto& a = coarse.observers[0];
  const auto& b = fine.observers[0];
  // the two runs start sampling at slightly different times near the origin
  std::size_t j = 0;
  double peak = 0.0, diff = 0.0;
  int matched = 0;
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    while (j < b.t.size() && b.t[j] < a.t[i] - 1e-9) ++j;
    if (j == b.t.size() || std::abs(b.t[j] - a.t[i]) > 1e-9) continue;
    ++matched;
    peak = std::max(peak, std::abs(b.value[j]));
    diff = std::max(diff, std::abs(a.value[i] - b.value[j]));
  }
  CHECK(matched + 2 >= int(a.t.size()));
  CHECK(diff <= 0.1 * 0.1 * peak);
}

TEST_CASE("Richardson ratios in the pre-tail epoch") {
  const auto m = make_model(3, 1.0);
  for (int order : {2, 4}) {
    std::vector<std::vector<double>> runs;
    for (int k = 0; k < 3; ++k) {
      auto cfg = base_config(PulseKind::Ingoing, 5.0, 30.0);
      cfg.order = order;
      cfg.dr = 0.1 / double(1 << k);
      cfg.sample_every = 1 << k;
      cfg.observers = {RegionSpec::fixed_r(10.0)};
      runs.push_back(run(m, cfg).observers[0].value);
    }
    REQUIRE(runs[0].size() == runs[2].size());
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < runs[0].size(); ++i) {
      d1 = std::max(d1, std::abs(runs[0][i] - runs[1][i]));
      d2 = std::max(d2, std::abs(runs[1][i] - runs[2][i]));
    }
    MESSAGE("order " << order << " ratio " << d1 / d2);
    CHECK(std::abs(d1 / d2 - std::pow(2.0, order)) < 0.5);
  }
}
