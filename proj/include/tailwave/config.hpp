#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tailwave/evolve.hpp"
#include "tailwave/model.hpp"

namespace tailwave {

/// key = value lines grouped under optional [section] headers; '#' starts a comment.
struct ConfigFile {
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
    bool operator==(const Section&) const = default;
  };
  std::vector<Section> sections;  // the unnamed root section comes first when present

  const Section* section(const std::string& name) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
  std::string serialize() const;
  bool operator==(const ConfigFile&) const = default;
};

/// Throws ConfigParse with the line number.
ConfigFile parse_config(const std::string& text, const std::string& origin = "<string>");
/// Missing or unreadable files raise ConfigParse as well.
ConfigFile read_config(const std::filesystem::path& path);

struct ParsedNumber {
  double value = 0.0;
  std::optional<std::pair<std::int64_t, std::int64_t>> rational;
};

/// Decimal, p/q, sqrt(d), -sqrt(d) or a*sqrt(d).
ParsedNumber parse_number(const std::string& text);

/// Model keys: n, ell, alpha | alpha_re, alpha_im, S_re, S_im, potential, delta, r_match,
/// match_tol, pert_eps, pert_delta_t, pert_w. Read from [model] or the root section.
ModeModel model_from_config(const ConfigFile& cfg);
/// Evolve keys: dr, cfl, T_max, order, observers, pulse, pulse_center, pulse_width,
/// pulse_amplitude, sample_every, monitor_every, kernel. Read from [evolve] or the root section.
EvolutionConfig evolution_from_config(const ConfigFile& cfg);

/// Canonical [model] section for a model (used in manifests).
std::string model_to_config(const ModeModel& model);

std::vector<RegionSpec> parse_observers(const std::string& text);

}  // namespace tailwave
