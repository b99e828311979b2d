#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailwave/profile.hpp"

namespace tailwave {

/// Leading-coefficient chain evaluated exactly in Q(sqrt(d))[i].
struct ExactChain {
  /// nu_0 = nu_rational * sqrt(d); d = 1 when nu_0 is rational.
  std::int64_t d = 1;
  std::vector<std::string> symbolic;
  std::vector<cplx> values;
};

/// Exact chain of length k for S = 0 and rational alpha = num / den, n >= 1.
/// Returns nullopt when nu_0^2 <= 0 or an intermediate denominator vanishes.
std::optional<ExactChain> exact_leading_chain(int n, std::int64_t alpha_num, std::int64_t alpha_den, int k);

}  // namespace tailwave
