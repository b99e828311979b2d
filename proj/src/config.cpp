#include "tailwave/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "tailwave/errors.hpp"

namespace tailwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_error(const std::string& m) { throw Error(ErrorCode::ConfigParse, m); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double strict_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (...) {
    parse_error("not a number: '" + s + "'");
  }
  if (pos != s.size()) parse_error("not a number: '" + s + "'");
  return v;
}

std::optional<std::pair<std::int64_t, std::int64_t>> decimal_rational(const std::string& s) {
  // Plain decimals without exponent, at most 15 fractional digits.
  std::string t = s;
  bool neg = false;
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    neg = t[0] == '-';
    t = t.substr(1);
  }
  if (t.empty()) return std::nullopt;
  const auto dot = t.find('.');
  std::string ip = t.substr(0, dot), fp = dot == std::string::npos ? "" : t.substr(dot + 1);
  auto digits = [](const std::string& x) { return std::all_of(x.begin(), x.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }); };
  if (!digits(ip) || !digits(fp) || (ip.empty() && fp.empty()) || fp.size() > 15 || ip.size() + fp.size() > 18) return std::nullopt;
  std::int64_t den = 1;
  for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
  std::int64_t num = (ip.empty() ? 0 : std::stoll(ip)) * den + (fp.empty() ? 0 : std::stoll(fp));
  const std::int64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
  return std::make_pair(neg ? -num : num, den);
}

const ConfigFile::Section* pick(const ConfigFile& cfg, const std::string& name) {
  if (const auto* s = cfg.section(name)) return s;
  return cfg.section("");
}

class Reader {
 public:
  Reader(const ConfigFile::Section* s, std::set<std::string> allowed) : s_(s), allowed_(std::move(allowed)) {
    if (!s_) return;
    for (const auto& [k, v] : s_->entries)
      if (!allowed_.count(k)) parse_error("unknown key '" + k + "'" + (s_->name.empty() ? "" : " in [" + s_->name + "]"));
  }
  std::optional<std::string> raw(const std::string& key) const {
    if (!s_) return std::nullopt;
    for (const auto& [k, v] : s_->entries)
      if (k == key) return v;
    return std::nullopt;
  }
  std::optional<ParsedNumber> number(const std::string& key) const {
    const auto r = raw(key);
    if (!r) return std::nullopt;
    return parse_number(*r);
  }
  double real(const std::string& key, double fallback) const {
    const auto v = number(key);
    return v ? v->value : fallback;
  }
  int integer(const std::string& key, int fallback) const {
    const auto v = number(key);
    if (!v) return fallback;
    if (v->value != std::floor(v->value) || std::abs(v->value) > 1e9) parse_error(key + " must be an integer");
    return int(v->value);
  }

 private:
  const ConfigFile::Section* s_;
  std::set<std::string> allowed_;
};

}  // namespace

const ConfigFile::Section* ConfigFile::section(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

std::optional<std::string> ConfigFile::get(const std::string& section_name, const std::string& key) const {
  if (const auto* s = section(section_name))
    for (const auto& [k, v] : s->entries)
      if (k == key) return v;
  return std::nullopt;
}

void ConfigFile::set(const std::string& section_name, const std::string& key, const std::string& value) {
  auto it = std::find_if(sections.begin(), sections.end(), [&](const Section& s) { return s.name == section_name; });
  if (it == sections.end()) {
    sections.push_back({section_name, {}});
    it = sections.end() - 1;
  }
  for (auto& [k, v] : it->entries)
    if (k == key) {
      v = value;
      return;
    }
  it->entries.emplace_back(key, value);
}

std::string ConfigFile::serialize() const {
  std::string out;
  for (const auto& s : sections) {
    if (!s.name.empty()) out += "[" + s.name + "]\n";
    for (const auto& [k, v] : s.entries) out += k + " = " + v + "\n";
  }
  return out;
}

ConfigFile parse_config(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::string current;
  std::set<std::pair<std::string, std::string>> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') parse_error(where + ": unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) parse_error(where + ": empty section name");
      if (cfg.section(current)) parse_error(where + ": duplicate section [" + current + "]");
      cfg.sections.push_back({current, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_error(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) parse_error(where + ": empty key");
    if (!seen.insert({current, key}).second) parse_error(where + ": duplicate key '" + key + "'");
    cfg.set(current, key, value);
  }
  // Root entries first so serialization round-trips.
  std::stable_partition(cfg.sections.begin(), cfg.sections.end(), [](const auto& s) { return s.name.empty(); });
  return cfg;
}

ConfigFile read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

ParsedNumber parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) parse_error("empty number");
  const auto sq = s.find("sqrt(");
  if (sq != std::string::npos) {
    if (s.back() != ')') parse_error("malformed sqrt literal '" + s + "'");
    const double d = strict_double(s.substr(sq + 5, s.size() - sq - 6));
    if (d < 0.0) parse_error("sqrt of a negative number in '" + s + "'");
    double factor = 1.0;
    std::string pre = trim(s.substr(0, sq));
    if (pre == "-") {
      factor = -1.0;
    } else if (!pre.empty()) {
      if (pre.back() != '*') parse_error("malformed sqrt literal '" + s + "'");
      factor = parse_number(pre.substr(0, pre.size() - 1)).value;
    }
    return {factor * std::sqrt(d), std::nullopt};
  }
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const auto p = decimal_rational(trim(s.substr(0, slash)));
    const auto q = decimal_rational(trim(s.substr(slash + 1)));
    if (!p || !q || p->second != 1 || q->second != 1) parse_error("malformed fraction '" + s + "'");
    if (q->first == 0) parse_error("zero denominator in '" + s + "'");
    std::int64_t num = p->first, den = q->first;
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    return {double(num) / double(den), std::make_pair(num / g, den / g)};
  }
  const double v = strict_double(s);
  return {v, decimal_rational(s)};
}

std::vector<RegionSpec> parse_observers(const std::string& text) {
  std::vector<RegionSpec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) parse_error("observer '" + item + "' needs kind:value");
    const std::string kind = trim(item.substr(0, colon));
    const double v = parse_number(item.substr(colon + 1)).value;
    if (kind == "r")
      out.push_back(RegionSpec::fixed_r(v));
    else if (kind == "ray")
      out.push_back(RegionSpec::ray(v));
    else if (kind == "scri")
      out.push_back(RegionSpec::scri(v));
    else
      parse_error("unknown observer kind '" + kind + "'");
  }
  return out;
}

ModeModel model_from_config(const ConfigFile& cfg) {
  const Reader rd(pick(cfg, "model"), {"n", "ell", "alpha", "alpha_re", "alpha_im", "S_re", "S_im", "potential",
                                       "delta", "r_match", "match_tol", "pert_eps", "pert_delta_t", "pert_w"});
  ModeModel m;
  m.n = rd.integer("n", 3);
  m.ell = rd.integer("ell", 0);
  if (rd.raw("alpha") && rd.raw("alpha_re")) parse_error("give either alpha or alpha_re, not both");
  const auto are = rd.raw("alpha") ? rd.number("alpha") : rd.number("alpha_re");
  const double aim = rd.real("alpha_im", 0.0);
  m.alpha = cplx(are ? are->value : 0.0, aim);
  if (aim == 0.0) m.alpha_rational = are ? are->rational : std::make_optional(std::pair<std::int64_t, std::int64_t>{0, 1});
  m.S = cplx(rd.real("S_re", 0.0), rd.real("S_im", 0.0));
  if (const auto p = rd.raw("potential")) {
    try {
      m.potential = parse_profile(*p);
    } catch (const Error& e) {
      parse_error(std::string("potential: ") + e.what());
    }
  }
  m.delta = rd.real("delta", 1.0);
  m.r_match = rd.real("r_match", 0.0);
  m.match_tol = rd.real("match_tol", 1e-12);
  if (rd.raw("pert_eps") || rd.raw("pert_delta_t") || rd.raw("pert_w")) {
    NonstatPerturbation p;
    p.eps = rd.real("pert_eps", 0.0);
    p.delta_t = rd.real("pert_delta_t", 1.0);
    if (const auto w = rd.raw("pert_w")) {
      try {
        p.w = parse_profile(*w);
      } catch (const Error& e) {
        parse_error(std::string("pert_w: ") + e.what());
      }
    }
    m.perturbation = p;
  }
  m.finalize();
  return m;
}

EvolutionConfig evolution_from_config(const ConfigFile& cfg) {
  const Reader rd(pick(cfg, "evolve"), {"dr", "cfl", "T_max", "order", "observers", "pulse", "pulse_center",
                                        "pulse_width", "pulse_amplitude", "sample_every", "monitor_every", "kernel"});
  EvolutionConfig c;
  c.dr = rd.real("dr", c.dr);
  c.cfl = rd.real("cfl", c.cfl);
  c.T_max = rd.real("T_max", c.T_max);
  c.order = rd.integer("order", c.order);
  c.sample_every = rd.integer("sample_every", c.sample_every);
  c.monitor_every = rd.integer("monitor_every", c.monitor_every);
  if (const auto o = rd.raw("observers")) c.observers = parse_observers(*o);
  if (const auto p = rd.raw("pulse")) {
    if (*p == "ingoing")
      c.data.kind = PulseKind::Ingoing;
    else if (*p == "outgoing")
      c.data.kind = PulseKind::Outgoing;
    else if (*p == "time_symmetric")
      c.data.kind = PulseKind::TimeSymmetric;
    else
      parse_error("pulse must be ingoing, outgoing or time_symmetric");
  }
  c.data.center = rd.real("pulse_center", c.data.center);
  c.data.width = rd.real("pulse_width", c.data.width);
  c.data.amplitude = rd.real("pulse_amplitude", c.data.amplitude);
  if (const auto k = rd.raw("kernel")) {
    if (*k == "serial")
      c.kernel = KernelKind::Serial;
    else if (*k == "openmp")
      c.kernel = KernelKind::OpenMP;
    else
      parse_error("kernel must be serial or openmp");
  }
  c.validate();
  return c;
}

std::string model_to_config(const ModeModel& m) {
  ConfigFile cfg;
  auto put = [&](const std::string& k, const std::string& v) { cfg.set("model", k, v); };
  put("n", std::to_string(m.n));
  put("ell", std::to_string(m.ell));
  if (m.alpha_rational && m.alpha.imag() == 0.0)
    put("alpha_re", std::to_string(m.alpha_rational->first) + "/" + std::to_string(m.alpha_rational->second));
  else
    put("alpha_re", fmt(m.alpha.real()));
  put("alpha_im", fmt(m.alpha.imag()));
  put("S_re", fmt(m.S.real()));
  put("S_im", fmt(m.S.imag()));
  put("potential", m.potential.describe());
  put("delta", fmt(m.delta));
  put("r_match", fmt(m.r_match));
  put("match_tol", fmt(m.match_tol));
  if (m.perturbation) {
    put("pert_eps", fmt(m.perturbation->eps));
    put("pert_delta_t", fmt(m.perturbation->delta_t));
    put("pert_w", m.perturbation->w.describe());
  }
  return cfg.serialize();
}

}  // namespace tailwave
