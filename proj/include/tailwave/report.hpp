#pragma once

#include <string>

#include "json.hpp"
#include "tailwave/evolve.hpp"
#include "tailwave/fitting.hpp"
#include "tailwave/indicial.hpp"
#include "tailwave/low_energy.hpp"
#include "tailwave/spectral_family.hpp"

namespace tailwave {

using json = nlohmann::ordered_json;

json to_json(cplx z);
json model_json(const ModeModel& model);
json indicial_json(const ModeModel& model, int ell_max);
json stability_json(const StabilityReport& rep);
json ledger_json(const ExpansionLedger& ledger);
/// Exponent predictions plus the closed-form shape tags and a few a_T samples.
json profile_json(const ModeModel& model, const ProfileData& profile);
json predictions_json(const ModeModel& model);
json verdict_json(const VerdictReport& rep);
json manifest_json(const ModeModel& model, const EvolutionConfig& cfg, const FieldHistory& h);

/// "r_10.csv" style file name for an observer.
std::string observer_file(const RegionSpec& region);

}  // namespace tailwave
