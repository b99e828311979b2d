#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailwave/model.hpp"

namespace tailwave {

/// Predicted decay rates at null infinity, along timelike rays and at fixed r.
struct DecayExponents {
  double scri = 0.0;
  double iota = 0.0;
  double T = 0.0;
  /// Set when the leading-order chain degenerates: the rates are then upper bounds.
  bool upper_bound_only = false;
};

struct IndicialData {
  int n = 3;
  std::vector<cplx> nu;
  std::vector<cplx> lambda_minus;
  std::vector<cplx> lambda_plus;
  double beta_minus = 0.0;
  double beta_plus = 0.0;
  int k = 0;
  DecayExponents exponents;
};

struct NondegeneracyReport {
  bool simple_pole = true;
  bool f_chain_nonzero = true;
  std::optional<int> first_vanishing;
  std::optional<int> indicial_collision;
  bool tf_log_case = false;
  bool near_log_warning = false;
  /// Integer gap with lambda^+ - k != lambda^-: not handled by the expansion.
  bool unhandled_resonant_case = false;
  std::optional<int> eqev_alpha_violation;
  std::vector<std::string> warnings;

  bool nondegenerate() const {
    return simple_pole && f_chain_nonzero && !indicial_collision && !unhandled_resonant_case;
  }
};

/// nu_l = sqrt(((n-2)/2 + l)^2 + alpha), principal branch (Re nu > 0).
cplx nu_ell(int n, cplx alpha, int ell);

/// ceil(x) with integers recognised to 1e-10.
int ceil_tol(double x);

IndicialData indicial_roots(const ModeModel& model, int ell_max);
DecayExponents decay_predictions(const ModeModel& model);
NondegeneracyReport nondegeneracy_check(const ModeModel& model);

}  // namespace tailwave
