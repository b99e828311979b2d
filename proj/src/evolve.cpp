#include "tailwave/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tailwave/errors.hpp"
#include "tailwave/io.hpp"

namespace tailwave {

namespace {

constexpr double kTiny = 1e-250;

double gaussian(const Pulse& p, double r) {
  const double x = (r - p.center) / p.width;
  return p.amplitude * std::exp(-x * x);
}

double gaussian_dr(const Pulse& p, double r) {
  const double x = (r - p.center) / p.width;
  return -2.0 * x / p.width * p.amplitude * std::exp(-x * x);
}

// <x>^{-d} with cheap paths for the common integer rates.
double time_factor(double x, double d) {
  const double q = 1.0 + x * x;
  if (d == 1.0) return 1.0 / std::sqrt(q);
  if (d == 2.0) return 1.0 / q;
  return std::pow(q, -0.5 * d);
}

std::string pulse_name(PulseKind k) {
  switch (k) {
    case PulseKind::TimeSymmetric: return "time_symmetric";
    case PulseKind::Ingoing: return "ingoing";
    case PulseKind::Outgoing: return "outgoing";
  }
  return "ingoing";
}

}  // namespace

void EvolutionConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::ConfigInvalid, m); };
  if (!(dr > 0.0) || !std::isfinite(dr)) bad("dr must be positive");
  // Above 0.95 the run proceeds and the energy monitor decides.
  if (!(cfl > 0.0) || cfl > 4.0) bad("cfl must lie in (0, 0.95]");
  if (!(T_max > 0.0) || !std::isfinite(T_max)) bad("T_max must be positive");
  if (order != 2 && order != 4) bad("order must be 2 or 4");
  if (sample_every < 1) bad("sample_every must be >= 1");
  if (monitor_every < 1) bad("monitor_every must be >= 1");
  if (!(data.width > 0.0)) bad("pulse width must be positive");
  if (!(data.center > 0.0)) bad("pulse center must be positive");
  if (!std::isfinite(data.amplitude)) bad("pulse amplitude must be finite");
  for (const auto& o : observers) o.validate();
}

double EvolutionConfig::max_sampled_radius() const {
  double m = 0.0;
  for (const auto& o : observers) m = std::max(m, o.kind == RegionKind::Tplus ? o.param : o.radius_at(T_max));
  return m;
}

double EvolutionConfig::R_max() const {
  return 0.5 * (T_max + max_sampled_radius()) + data.center + 5.0 * data.width + 10.0 * dr;
}

std::string EvolutionConfig::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "dr = " << dr << "\ncfl = " << cfl << "\nT_max = " << T_max << "\norder = " << order
     << "\nsample_every = " << sample_every << "\nmonitor_every = " << monitor_every
     << "\nkernel = " << (kernel == KernelKind::Serial ? "serial" : "openmp") << "\npulse = " << pulse_name(data.kind)
     << "\npulse_center = " << data.center << "\npulse_width = " << data.width
     << "\npulse_amplitude = " << data.amplitude << "\nobservers = ";
  for (std::size_t i = 0; i < observers.size(); ++i) {
    const auto& o = observers[i];
    if (i) os << ", ";
    os << (o.kind == RegionKind::Tplus ? "r:" : o.kind == RegionKind::IotaPlus ? "ray:" : "scri:") << o.param;
  }
  os << '\n';
  return os.str();
}

std::string EvolutionConfig::hash() const {
  // The kernel choice does not change the numbers.
  EvolutionConfig c = *this;
  c.kernel = KernelKind::OpenMP;
  return fnv1a_hex(c.describe());
}

const ObserverSeries* FieldHistory::find(const RegionSpec& region) const {
  for (const auto& o : observers)
    if (o.region.kind == region.kind && std::abs(o.region.param - region.param) <= 1e-12 * std::max(1.0, std::abs(region.param)))
      return &o;
  return nullptr;
}

double floor_estimate(double amplitude, double dr, int order) {
  const double c_scheme = order == 4 ? 1e-8 : 1e-6;
  return std::abs(amplitude) * std::pow(dr, order) * c_scheme;
}

Evolver::Evolver(const ModeModel& model, const EvolutionConfig& cfg, std::optional<double> domain)
    : n_(model.n), spec_{cfg.dr, cfg.order}, kernel_(cfg.kernel), dt_(cfg.dt()), amplitude_(cfg.data.amplitude) {
  cfg.validate();
  if (!model.is_real()) throw Error(ErrorCode::ConfigInvalid, "time-domain evolution needs real alpha and V");
  if (model.S != cplx(0.0)) throw Error(ErrorCode::ConfigInvalid, "time-domain evolution needs S = 0");
  const double R = domain ? *domain : cfg.R_max();
  const auto N = std::size_t(std::ceil(R / cfg.dr));
  if (N < 8) throw Error(ErrorCode::ConfigInvalid, "domain too small for the stencil");
  r_.resize(N);
  W_.resize(N);
  const auto weff = effective_potential(model);
  for (std::size_t i = 0; i < N; ++i) {
    r_[i] = (double(i) + 0.5) * cfg.dr;
    W_[i] = weff(r_[i]).real();
  }
  if (model.perturbation && model.perturbation->eps != 0.0) {
    pert_ = model.perturbation;
    pert_w_.resize(N);
    for (std::size_t i = 0; i < N; ++i) pert_w_[i] = pert_->eps * pert_->w(r_[i]).real();
    Wt_.resize(N);
  }
  a_.assign(N, 0.0);
  b_.assign(N, 0.0);
  c_.assign(N, 0.0);
  work_.assign(N, 0.0);
  work2_.assign(N, 0.0);

  std::vector<double> v(N, 0.0);
  const double sgn = cfg.data.kind == PulseKind::Ingoing ? 1.0 : cfg.data.kind == PulseKind::Outgoing ? -1.0 : 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    a_[i] = gaussian(cfg.data, r_[i]);
    v[i] = sgn * gaussian_dr(cfg.data, r_[i]);
    if (std::abs(a_[i]) > kTiny || std::abs(v[i]) > kTiny) active_ = i + 1;
  }

  // Second level from the Taylor expansion in time.
  fill_potential(0.0);
  const auto& Wnow = pert_ ? Wt_ : W_;
  std::vector<double> l0(N, 0.0), lv(N, 0.0), ll0(N, 0.0);
  const std::size_t m = std::min(N, active_ + 2 * step_reach(cfg.order));
  apply_operator_serial(a_, Wnow, l0, m, spec_);
  apply_operator_serial(v, Wnow, lv, m, spec_);
  apply_operator_serial(l0, Wnow, ll0, m, spec_);
  const double h = dt_;
  for (std::size_t i = 0; i < m; ++i)
    b_[i] = a_[i] + h * v[i] + h * h / 2.0 * l0[i] + h * h * h / 6.0 * lv[i] + h * h * h * h / 24.0 * ll0[i];
  active_ = m;
  prev_ = &a_;
  cur_ = &b_;
  next_ = &c_;
  steps_ = 1;
}

void Evolver::fill_potential(double t) {
  if (!pert_) return;
  const std::size_t m = std::min(r_.size(), active_ + 2 * step_reach(spec_.order) + 2);
  for (std::size_t i = 0; i < m; ++i) Wt_[i] = W_[i] + pert_w_[i] * time_factor(t - r_[i], pert_->delta_t);
}

void Evolver::step() {
  const std::size_t N = r_.size();
  const std::size_t count = std::min(N, active_ + step_reach(spec_.order));
  fill_potential(time());
  leapfrog_step(kernel_, *prev_, *cur_, *next_, pert_ ? Wt_ : W_, work_, work2_, count, dt_, spec_);
  auto* old = prev_;
  prev_ = cur_;
  cur_ = next_;
  next_ = old;
  active_ = count;
  const double tiny = kTiny * std::max(std::abs(amplitude_), 1e-300);
  while (active_ > 0 && std::abs((*cur_)[active_ - 1]) < tiny && std::abs((*prev_)[active_ - 1]) < tiny) {
    --active_;
    (*cur_)[active_] = 0.0;
    (*prev_)[active_] = 0.0;
    (*next_)[active_] = 0.0;
  }
  ++steps_;
}

std::optional<double> Evolver::psi_at(double r) const {
  const double x = r / spec_.dr - 0.5;
  const long i0 = long(std::floor(x));
  const long N = long(r_.size());
  if (r <= 0.0 || i0 + 2 >= N) return std::nullopt;
  const auto& p = *cur_;
  auto at = [&](long j) { return j < 0 ? -p[std::size_t(-j - 1)] : p[std::size_t(j)]; };
  const double s = x - double(i0);
  const double f0 = at(i0 - 1), f1 = at(i0), f2 = at(i0 + 1), f3 = at(i0 + 2);
  // Lagrange weights on nodes -1, 0, 1, 2.
  const double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
  const double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
  const double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
  const double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
  return w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3;
}

double Evolver::energy() const {
  const std::size_t N = r_.size();
  const std::size_t m = std::min(N, active_ + step_reach(spec_.order));
  std::vector<double> l(N, 0.0), ll(N, 0.0);
  const double dt2 = dt_ * dt_;
  apply_operator_serial(*prev_, W_, l, std::min(N, m + 2), spec_);
  if (spec_.order == 4) apply_operator_serial(l, W_, ll, m, spec_);
  CompensatedSum sum;
  for (std::size_t i = 0; i < m; ++i) {
    const double vt = ((*cur_)[i] - (*prev_)[i]) / dt_;
    const double lm = spec_.order == 4 ? l[i] + dt2 / 12.0 * ll[i] : l[i];
    sum.add(vt * vt - (*cur_)[i] * lm);
  }
  return 0.5 * spec_.dr * sum.value();
}

double Evolver::sup_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < active_; ++i) m = std::max(m, std::abs((*cur_)[i]));
  return m;
}

FieldHistory run(const ModeModel& model, const EvolutionConfig& cfg) {
  Evolver ev(model, cfg);
  FieldHistory h;
  h.config_hash = cfg.hash();
  h.model_hash = model.hash();
  h.floor = floor_estimate(cfg.data.amplitude, cfg.dr, cfg.order);
  h.R_max = cfg.R_max();
  h.dr = cfg.dr;
  h.dt = ev.dt();
  h.order = cfg.order;
  h.n = model.n;
  h.amplitude = cfg.data.amplitude;
  if (cfg.cfl > 0.95) h.warnings.push_back("cfl above 0.95");
  for (const auto& o : cfg.observers) h.observers.push_back({o, {}, {}});
  const double half = 0.5 * double(model.n - 1);
  const double r_lo = 0.5 * cfg.dr;

  auto record = [&]() {
    const double t = ev.time();
    for (auto& o : h.observers) {
      const double r = o.region.radius_at(t);
      if (r < r_lo) continue;
      const auto psi = ev.psi_at(r);
      if (!psi) continue;
      o.t.push_back(t);
      o.value.push_back(o.region.kind == RegionKind::ScriPlus ? *psi : *psi / std::pow(r, half));
    }
  };

  // The constructor already produced level 1; level 0 is not re-sampled.
  const long total = long(std::ceil(cfg.T_max / ev.dt() - 1e-9));
  const bool conserved = !model.perturbation || model.perturbation->eps == 0.0;
  const double e0 = conserved ? ev.energy() : 0.0;
  double sup0 = ev.sup_norm();
  if (ev.steps() % cfg.sample_every == 0) record();
  while (ev.steps() < total) {
    ev.step();
    if (ev.steps() % cfg.sample_every == 0) record();
    if (ev.steps() % cfg.monitor_every == 0) {
      const double s = ev.sup_norm();
      bool blown = !std::isfinite(s) || s > 1e8 * std::max(sup0, 1e-300);
      if (conserved && !blown) {
        const double e = ev.energy();
        h.energy_t.push_back(ev.time());
        h.energy.push_back(e);
        blown = !std::isfinite(e) || std::abs(e - e0) > 1e3 * std::max(std::abs(e0), 1e-300);
      }
      if (blown)
        throw Error(ErrorCode::UnstableCFL, "energy blow-up at step " + std::to_string(ev.steps()) +
                                                " (cfl " + std::to_string(cfg.cfl) + ")");
    }
  }
  h.steps = ev.steps();
  return h;
}

std::pair<std::vector<double>, std::vector<double>> sample(const FieldHistory& history, const RegionSpec& region) {
  const auto* o = history.find(region);
  if (!o) throw Error(ErrorCode::ObserverMissing, "no observer " + region.key() + " was recorded");
  return {o->t, o->value};
}

}  // namespace tailwave
