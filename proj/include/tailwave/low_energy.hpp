#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailwave/indicial.hpp"
#include "tailwave/model.hpp"
#include "tailwave/radial_ode.hpp"

namespace tailwave {

struct ChainResult {
  std::vector<cplx> f;
  /// Set when the exact Q(sqrt d) evaluation was used (and agreed with floating point).
  std::optional<std::vector<std::string>> exact;
  std::optional<int> first_zero;  // 1-based index of the first vanishing entry
};

/// f_1 = -2i(lambda^+ - (n-1)/2 - S),
/// f_{j+1} = -2i(lambda^+ - j - (n-1)/2 - S) / p(lambda^+ - j) f_j,  p(l) = -l^2 + (n-2) l + alpha,
/// for j < k. Throws IndicialCollision if p(lambda^+ - j) vanishes.
ChainResult leading_coefficient_chain_detail(const ModeModel& model);
std::vector<cplx> leading_coefficient_chain(const ModeModel& model);

struct TransitionFaceOptions {
  double tol = 1e-12;
  std::vector<double> match_radii{20.0, 40.0};
  /// Series start radius for the outgoing data; 0 picks it adaptively.
  double start_radius = 0.0;
  int series_terms = 12;
  double fit_tol = 1e-4;
};

struct TransitionFaceResult {
  int sign = 1;
  /// Coefficient of r^{-lambda^-} (log case: of r^{-lambda^-} log r).
  cplx u_prime_0 = 0.0;
  /// Log case only: the matched coefficient of r^{-lambda^-} without log.
  cplx u_prime_1 = 0.0;
  /// Log case only: log coefficient predicted by the local recursion at r = 0.
  cplx u_prime_0_series = 0.0;
  bool log_case = false;
  std::vector<double> match_radii;
  std::vector<cplx> estimates;  // u_prime_0 (non-log) or u_prime_1 (log) per radius
  double match_residual = 0.0;
  /// Log case: size of the fitted r^{-lambda^+} component relative to u_prime_0.
  double singular_residual = 0.0;
  std::vector<std::string> warnings;
};

/// Solve N_tf^{+-} u' = f_k0 r^{-(lambda^+ - k) - 2} on (0, inf) with outgoing data at
/// infinity and no r^{-lambda^+} component at 0.
TransitionFaceResult transition_face_solve(const ModeModel& model, cplx f_k0, int sign,
                                           const TransitionFaceOptions& opts = {});

/// Outgoing Hankel-type solution of the Bessel equation on an ascending z grid (z > 0).
std::vector<cplx> hankel_outgoing(cplx nu, std::span<const double> z, double tol = 1e-12);
/// Values and derivatives.
RadialSolution hankel_outgoing_solution(cplx nu, std::span<const double> z, double tol = 1e-12);

enum class APlusKind { MinkowskiEven, InverseSquare, Unavailable };

struct ProfileData {
  int n = 3;
  double t_exponent_T = 0.0;
  double t_exponent_iota = 0.0;
  cplx lambda_minus = 0.0;
  cplx nu0 = 0.0;
  std::shared_ptr<const RadialSolution> a_T;
  APlusKind a_plus_kind = APlusKind::Unavailable;
  std::optional<cplx> amplitude;
  bool log_case = false;

  /// a_+(v), normalised to 1 at v = infinity; NaN when unavailable.
  double a_plus(double v) const;
  /// Large zero-energy state a_T(r) ~ r^{-lambda^-}; exact two-branch form past the table.
  double a_T_at(double r) const;
  std::string a_plus_tag() const;
};

struct ExpansionLedger {
  int k = 0;
  std::vector<cplx> f0_chain;
  std::optional<std::vector<std::string>> f0_exact;
  bool degenerate = false;
  std::optional<int> degenerate_at;
  bool log_case = false;
  std::optional<TransitionFaceResult> tf_plus;
  std::optional<TransitionFaceResult> tf_minus;
  std::optional<cplx> u_prime_plus0;
  std::optional<cplx> u_prime_minus0;
  std::vector<RadialSolution> u_j;
  /// Leading tail coefficient of u_j: predicted f_j / p(lambda^+ - j) and fitted.
  std::vector<cplx> u_j_predicted;
  std::vector<cplx> u_j_fitted;
  NondegeneracyReport report;
  std::vector<std::string> warnings;
};

struct LedgerOptions {
  bool with_u_j = false;
  TransitionFaceOptions tf;
};

ExpansionLedger build_ledger(const ModeModel& model, const LedgerOptions& opts = {});

/// Throws DegenerateLedger for degenerate ledgers.
ProfileData assemble_profile(const ModeModel& model, const ExpansionLedger& ledger);

}  // namespace tailwave
