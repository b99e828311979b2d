#include "tailwave/fitting.hpp"

#include <algorithm>
#include <cmath>

#include "tailwave/errors.hpp"

namespace tailwave {

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const auto i = std::size_t(std::floor(pos));
  const double f = pos - double(i);
  return i + 1 < v.size() ? v[i] * (1.0 - f) + v[i + 1] * f : v[i];
}

}  // namespace

SlopeEstimate local_exponent(std::span<const double> t, std::span<const double> u, double t_lo, double t_hi,
                             double floor, int rungs) {
  if (t.size() != u.size()) throw Error(ErrorCode::GridMismatch, "t and u lengths differ");
  if (!(t_lo > 0.0) || !(t_hi > t_lo)) throw Error(ErrorCode::FitInvalid, "window must satisfy 0 < t_lo < t_hi");
  const auto lo = std::size_t(std::lower_bound(t.begin(), t.end(), t_lo) - t.begin());
  const auto hi = std::size_t(std::upper_bound(t.begin(), t.end(), t_hi) - t.begin());
  if (hi <= lo + 2) throw Error(ErrorCode::FitInvalid, "fewer than three samples in the window");
  const double sign = u[lo] > 0.0 ? 1.0 : -1.0;
  for (std::size_t i = lo; i < hi; ++i) {
    if (!(u[i] * sign > 0.0))
      throw Error(ErrorCode::NonMonotoneEnvelope, "zero crossing near t = " + std::to_string(t[i]));
    if (floor > 0.0 && std::abs(u[i]) <= 10.0 * floor)
      throw Error(ErrorCode::BelowFloor, "|u| within 10x of the noise floor at t = " + std::to_string(t[i]));
  }
  std::vector<std::size_t> idx;
  const double a = t[lo], b = t[hi - 1];
  for (int k = 0; k <= rungs; ++k) {
    const double target = a * std::pow(b / a, double(k) / double(rungs));
    auto j = std::size_t(std::lower_bound(t.begin() + long(lo), t.begin() + long(hi), target) - t.begin());
    if (j >= hi) j = hi - 1;
    if (j > lo && target - t[j - 1] < t[j] - target) --j;
    if (idx.empty() || j > idx.back()) idx.push_back(j);
  }
  if (idx.size() < 3) throw Error(ErrorCode::FitInvalid, "fewer than three distinct rungs in the window");
  std::vector<double> p;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const std::size_t i = idx[k - 1], j = idx[k];
    p.push_back(-(std::log(std::abs(u[j])) - std::log(std::abs(u[i]))) / (std::log(t[j]) - std::log(t[i])));
  }
  SlopeEstimate s;
  s.p_median = quantile(p, 0.5);
  s.p_spread = quantile(p, 0.75) - quantile(p, 0.25);
  s.n_points = int(p.size());
  return s;
}

std::pair<double, double> default_window(double T_max) { return {0.25 * T_max, 0.95 * T_max}; }

double profile_shape(const ProfileData& profile, double t, double r) {
  const double ts = t - r;
  if (!(ts > 0.0)) return NAN;
  return std::pow(ts, -profile.t_exponent_T) * profile.a_T_at(r) * profile.a_plus(ts / r);
}

AmplitudeFit amplitude_profile_fit(std::span<const ObserverSeries> series, const ProfileData& profile, double t_lo,
                                   double t_hi, double residual_flag) {
  if (profile.a_plus_kind == APlusKind::Unavailable)
    throw Error(ErrorCode::DegenerateProfile, "no closed-form a_+ for this model");
  std::vector<double> z;
  std::size_t used = 0;
  for (const auto& o : series) {
    if (o.region.kind != RegionKind::Tplus) continue;
    ++used;
    const double r = o.region.param;
    for (std::size_t i = 0; i < o.t.size(); ++i) {
      if (o.t[i] < t_lo || o.t[i] > t_hi) continue;
      const double shape = profile_shape(profile, o.t[i], r);
      if (std::isfinite(shape) && shape != 0.0) z.push_back(o.value[i] / shape);
    }
  }
  if (used < 2) throw Error(ErrorCode::FitInvalid, "amplitude fit needs at least two fixed-r observers");
  if (z.empty()) throw Error(ErrorCode::FitInvalid, "no samples inside the fit window");
  AmplitudeFit fit;
  fit.n_samples = z.size();
  fit.c = quantile(z, 0.5);
  for (double v : z) fit.residual_max = std::max(fit.residual_max, std::abs(v - fit.c) / std::abs(fit.c));
  fit.residual_too_large = fit.residual_max > residual_flag;
  return fit;
}

AmplitudeFit amplitude_profile_fit(std::span<const ObserverSeries> series, const ModeModel& model, double t_lo,
                                   double t_hi, double residual_flag) {
  LedgerOptions lo;
  const auto ledger = build_ledger(model, lo);
  if (ledger.degenerate)
    throw Error(ErrorCode::DegenerateProfile, "leading coefficient f_" + std::to_string(ledger.degenerate_at.value_or(0)) +
                                                  " vanishes; no profile to fit");
  return amplitude_profile_fit(series, assemble_profile(model, ledger), t_lo, t_hi, residual_flag);
}

VerdictReport verdict(const std::map<std::string, double>& predictions,
                      const std::map<std::string, SlopeEstimate>& measurements,
                      const std::map<std::string, double>& tolerances, double default_tol) {
  VerdictReport rep;
  if (measurements.empty()) {
    rep.status = "no data";
    return rep;
  }
  rep.pass = true;
  for (const auto& [key, pred] : predictions) {
    VerdictRow row;
    row.region = key;
    row.predicted = pred;
    const auto t = tolerances.find(key);
    row.tol = t != tolerances.end() ? t->second : default_tol;
    const auto m = measurements.find(key);
    if (m == measurements.end()) {
      row.note = "no data";
    } else {
      row.measured = m->second.p_median;
      row.diff = std::abs(m->second.p_median - pred);
      row.pass = row.diff <= row.tol;
    }
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  rep.status = rep.pass ? "pass" : "fail";
  return rep;
}

}  // namespace tailwave
