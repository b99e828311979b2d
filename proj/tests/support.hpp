#pragma once

#include <cstdlib>
#include <random>
#include <string>

#include "tailwave/model.hpp"

namespace tw_test {

/// Seed for the randomized property suites; TAILWAVE_SEED overrides.
inline std::uint64_t seed() {
  if (const char* s = std::getenv("TAILWAVE_SEED")) return std::strtoull(s, nullptr, 10);
  return 20240611ULL;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(seed());
  return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }
inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline tailwave::ModeModel make_model(int n, tailwave::cplx alpha, int ell = 0,
                                      tailwave::RadialProfile V = tailwave::RadialProfile::none()) {
  tailwave::ModeModel m;
  m.n = n;
  m.ell = ell;
  m.alpha = alpha;
  m.potential = std::move(V);
  m.finalize();
  return m;
}

}  // namespace tw_test
