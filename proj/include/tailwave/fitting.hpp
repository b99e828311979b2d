#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailwave/evolve.hpp"
#include "tailwave/low_energy.hpp"

namespace tailwave {

struct SlopeEstimate {
  double p_median = 0.0;
  double p_spread = 0.0;  // interquartile range
  int n_points = 0;
};

/// Median of -dlog|u|/dlog t over sample pairs picked on a geometric ladder in [t_lo, t_hi].
/// Throws BelowFloor, NonMonotoneEnvelope, FitInvalid (too few samples).
SlopeEstimate local_exponent(std::span<const double> t, std::span<const double> u, double t_lo, double t_hi,
                             double floor = 0.0, int rungs = 64);

/// Default window [T/4, 0.95 T].
std::pair<double, double> default_window(double T_max);

struct AmplitudeFit {
  double c = 0.0;
  double residual_max = 0.0;
  std::size_t n_samples = 0;
  bool residual_too_large = false;
};

/// Predicted shape t_*^{-T} a_T(r) a_+(t_*/r) with t_* = t - r.
double profile_shape(const ProfileData& profile, double t, double r);

/// Fits u ~ c * profile_shape over fixed-r observers inside [t_lo, t_hi].
AmplitudeFit amplitude_profile_fit(std::span<const ObserverSeries> series, const ProfileData& profile, double t_lo,
                                   double t_hi, double residual_flag = 0.10);
/// Builds the ledger and profile first; degenerate ledgers raise DegenerateProfile.
AmplitudeFit amplitude_profile_fit(std::span<const ObserverSeries> series, const ModeModel& model, double t_lo,
                                   double t_hi, double residual_flag = 0.10);

struct VerdictRow {
  std::string region;
  double predicted = 0.0;
  std::optional<double> measured;
  double diff = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

struct VerdictReport {
  std::vector<VerdictRow> rows;
  bool pass = false;
  std::string status;  // "pass", "fail" or "no data"
};

VerdictReport verdict(const std::map<std::string, double>& predictions,
                      const std::map<std::string, SlopeEstimate>& measurements,
                      const std::map<std::string, double>& tolerances, double default_tol = 0.15);

}  // namespace tailwave
