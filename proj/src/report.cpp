#include "tailwave/report.hpp"

#include "tailwave/config.hpp"

namespace tailwave {

json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json model_json(const ModeModel& m) {
  json j;
  j["n"] = m.n;
  j["ell"] = m.ell;
  j["alpha"] = to_json(m.alpha);
  j["S"] = to_json(m.S);
  j["potential"] = m.potential.describe();
  j["r_match"] = m.r_match;
  if (m.perturbation)
    j["perturbation"] = {{"eps", m.perturbation->eps},
                         {"delta_t", m.perturbation->delta_t},
                         {"w", m.perturbation->w.describe()}};
  j["hash"] = m.hash();
  return j;
}

json indicial_json(const ModeModel& model, int ell_max) {
  const auto d = indicial_roots(model, ell_max);
  const auto rep = nondegeneracy_check(model);
  json j;
  j["model"] = model_json(model);
  json nu = json::array(), lambda = json::array();
  for (int l = 0; l <= ell_max; ++l) {
    const auto i = std::size_t(l);
    nu.push_back(to_json(d.nu[i]));
    lambda.push_back({{"ell", l},
                      {"lambda_ell", model.angular_eigenvalue(l)},
                      {"minus", to_json(d.lambda_minus[i])},
                      {"plus", to_json(d.lambda_plus[i])}});
  }
  j["nu"] = nu;
  j["lambda"] = lambda;
  j["gap"] = {d.beta_minus, d.beta_plus};
  j["k"] = d.k;
  j["exponents"] = {{"scri", d.exponents.scri},
                    {"iota", d.exponents.iota},
                    {"T", d.exponents.T},
                    {"upper_bound_only", d.exponents.upper_bound_only}};
  json nd;
  nd["nondegenerate"] = rep.nondegenerate();
  nd["simple_pole"] = rep.simple_pole;
  nd["f_chain_nonzero"] = rep.f_chain_nonzero;
  nd["first_vanishing"] = rep.first_vanishing ? json(*rep.first_vanishing) : json(nullptr);
  nd["indicial_collision"] = rep.indicial_collision ? json(*rep.indicial_collision) : json(nullptr);
  nd["tf_log_case"] = rep.tf_log_case;
  nd["near_log_warning"] = rep.near_log_warning;
  nd["unhandled_resonant_case"] = rep.unhandled_resonant_case;
  nd["warnings"] = rep.warnings;
  j["nondegeneracy"] = nd;
  return j;
}

json stability_json(const StabilityReport& rep) {
  json j;
  j["stable"] = rep.stable;
  j["min_abs_W"] = rep.min_abs;
  json per = json::array();
  for (std::size_t l = 0; l < rep.min_abs_W.size(); ++l)
    per.push_back({{"ell", l}, {"min_abs_W", rep.min_abs_W[l]}, {"argmin", to_json(rep.argmin[l])}});
  j["modes"] = per;
  double drift = 0.0;
  for (const auto& row : rep.table) drift = std::max(drift, row.drift);
  j["max_wronskian_drift"] = drift;
  j["points"] = rep.table.size();
  return j;
}

json ledger_json(const ExpansionLedger& L) {
  json j;
  j["k"] = L.k;
  json chain = json::array();
  for (const auto& f : L.f0_chain) chain.push_back(to_json(f));
  j["f0_chain"] = chain;
  if (L.f0_exact) j["f0_exact"] = *L.f0_exact;
  j["degenerate"] = L.degenerate;
  if (L.degenerate_at) j["degenerate_at"] = *L.degenerate_at;
  j["log_case"] = L.log_case;
  auto tf = [](const std::optional<TransitionFaceResult>& t) -> json {
    if (!t) return nullptr;
    json e = json::array();
    for (const auto& x : t->estimates) e.push_back(to_json(x));
    json o{{"u_prime_0", to_json(t->u_prime_0)},
           {"match_radii", t->match_radii},
           {"estimates", e},
           {"match_residual", t->match_residual}};
    if (t->log_case) {
      o["u_prime_0_series"] = to_json(t->u_prime_0_series);
      o["u_prime_1"] = to_json(t->u_prime_1);
      o["singular_residual"] = t->singular_residual;
    }
    return o;
  };
  j["u_prime_plus0"] = L.u_prime_plus0 ? to_json(*L.u_prime_plus0) : json(nullptr);
  j["u_prime_minus0"] = L.u_prime_minus0 ? to_json(*L.u_prime_minus0) : json(nullptr);
  j["transition_face"] = {{"plus", tf(L.tf_plus)}, {"minus", tf(L.tf_minus)}};
  if (!L.u_j_predicted.empty()) {
    json uj = json::array();
    for (std::size_t i = 0; i < L.u_j_predicted.size(); ++i)
      uj.push_back({{"j", i + 1}, {"predicted", to_json(L.u_j_predicted[i])}, {"fitted", to_json(L.u_j_fitted[i])}});
    j["u_j"] = uj;
  }
  j["warnings"] = L.warnings;
  return j;
}

json predictions_json(const ModeModel& model) {
  const auto e = decay_predictions(model);
  return {{"scri", e.scri}, {"iota", e.iota}, {"T", e.T}, {"upper_bound_only", e.upper_bound_only}};
}

json profile_json(const ModeModel& model, const ProfileData& p) {
  json j;
  j["model"] = model_json(model);
  j["model_config"] = model_to_config(model);
  j["predictions"] = predictions_json(model);
  j["t_exponent_T"] = p.t_exponent_T;
  j["t_exponent_iota"] = p.t_exponent_iota;
  j["lambda_minus"] = to_json(p.lambda_minus);
  j["nu0"] = to_json(p.nu0);
  j["a_plus"] = p.a_plus_tag();
  j["log_case"] = p.log_case;
  json samples = json::array();
  for (double r : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0}) samples.push_back({{"r", r}, {"a_T", p.a_T_at(r)}});
  j["a_T_samples"] = samples;
  return j;
}

json verdict_json(const VerdictReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json o{{"region", r.region}, {"predicted", r.predicted}};
    o["measured"] = r.measured ? json(*r.measured) : json(nullptr);
    o["diff"] = r.diff;
    o["tol"] = r.tol;
    o["pass"] = r.pass;
    if (!r.note.empty()) o["note"] = r.note;
    rows.push_back(o);
  }
  return {{"status", rep.status}, {"pass", rep.pass}, {"rows", rows}};
}

json manifest_json(const ModeModel& model, const EvolutionConfig& cfg, const FieldHistory& h) {
  json j;
  j["config_hash"] = h.config_hash;
  j["model_hash"] = h.model_hash;
  j["model_config"] = model_to_config(model);
  j["evolve_config"] = cfg.describe();
  j["floor"] = h.floor;
  j["R_max"] = h.R_max;
  j["dr"] = h.dr;
  j["dt"] = h.dt;
  j["steps"] = h.steps;
  j["order"] = h.order;
  j["n"] = h.n;
  j["T_max"] = cfg.T_max;
  json obs = json::array();
  for (const auto& o : h.observers) obs.push_back({{"key", o.region.key()}, {"file", observer_file(o.region)}, {"samples", o.t.size()}});
  j["observers"] = obs;
  j["warnings"] = h.warnings;
  return j;
}

std::string observer_file(const RegionSpec& region) { return region.key() + ".csv"; }

}  // namespace tailwave
