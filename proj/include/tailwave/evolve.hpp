#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tailwave/kernels.hpp"
#include "tailwave/model.hpp"

namespace tailwave {

enum class PulseKind { TimeSymmetric, Ingoing, Outgoing };

/// Gaussian psi(0, r) = A exp(-((r - center) / width)^2).
struct Pulse {
  PulseKind kind = PulseKind::Ingoing;
  double center = 10.0;
  double width = 1.0;
  double amplitude = 1.0;
};

struct EvolutionConfig {
  double dr = 0.05;
  double cfl = 0.5;
  double T_max = 400.0;
  std::vector<RegionSpec> observers;
  Pulse data;
  int order = 4;
  int sample_every = 1;
  KernelKind kernel = KernelKind::OpenMP;
  int monitor_every = 10;

  /// Throws ConfigInvalid.
  void validate() const;
  double dt() const { return cfl * dr; }
  double max_sampled_radius() const;
  /// Outer radius derived from the domain of dependence of the samples.
  double R_max() const;
  /// Canonical key = value form (also the hash input).
  std::string describe() const;
  std::string hash() const;
};

struct ObserverSeries {
  RegionSpec region;
  std::vector<double> t;
  std::vector<double> value;  // u, or psi for ScriPlus
};

struct FieldHistory {
  std::vector<ObserverSeries> observers;
  std::string config_hash;
  std::string model_hash;
  double floor = 0.0;
  double R_max = 0.0;
  double dr = 0.0;
  double dt = 0.0;
  long steps = 0;
  int order = 4;
  int n = 3;
  double amplitude = 1.0;
  std::vector<double> energy_t, energy;
  std::vector<std::string> warnings;

  const ObserverSeries* find(const RegionSpec& region) const;
};

/// FD error amplitude recorded with every run and used as the fitting noise floor.
double floor_estimate(double amplitude, double dr, int order);

/// Leapfrog evolution of psi = r^{(n-1)/2} u on the offset grid, one mode.
class Evolver {
 public:
  /// `domain` overrides the derived outer radius (tests only).
  Evolver(const ModeModel& model, const EvolutionConfig& cfg, std::optional<double> domain = std::nullopt);

  void step();
  double time() const { return double(steps_) * dt_; }
  long steps() const { return steps_; }
  double dt() const { return dt_; }
  std::size_t size() const { return r_.size(); }
  std::size_t active() const { return active_; }
  double radius(std::size_t i) const { return r_[i]; }
  const std::vector<double>& psi() const { return *cur_; }
  /// Cubic interpolation of psi at r; nullopt outside the grid.
  std::optional<double> psi_at(double r) const;
  /// Staggered discrete energy between the two stored time levels (unperturbed operator).
  double energy() const;
  double sup_norm() const;

 private:
  void fill_potential(double t);

  int n_;
  StencilSpec spec_;
  KernelKind kernel_;
  double dt_;
  double amplitude_;
  long steps_ = 0;
  std::size_t active_ = 0;
  std::vector<double> r_, W_, Wt_, pert_w_;
  std::optional<NonstatPerturbation> pert_;
  std::vector<double> a_, b_, c_, work_, work2_;
  std::vector<double>*prev_, *cur_, *next_;
};

FieldHistory run(const ModeModel& model, const EvolutionConfig& cfg);

/// (t, value) series of a recorded observer; throws ObserverMissing.
std::pair<std::vector<double>, std::vector<double>> sample(const FieldHistory& history, const RegionSpec& region);

}  // namespace tailwave
