#include "eit/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "eit/lambda.hpp"

namespace eit::cli {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(RabiConvention c) { return c == RabiConvention::kAngular ? "angular" : "cyclic"; }

RabiConvention rabi_convention_from_string(const std::string& s) {
  if (s == "angular") return RabiConvention::kAngular;
  if (s == "cyclic") return RabiConvention::kCyclic;
  throw ConfigError("rabi_convention must be 'angular' or 'cyclic', got '" + s + "'");
}

double FieldConfig::rabi(RabiConvention c) const {
  if (rabi_in_hz && c == RabiConvention::kCyclic) return 2.0 * std::numbers::pi * rabi_value;
  return rabi_value;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Kind { kTime, kLength, kDensity, kDipole, kHz, kAngularRate, kRabi, kAngle, kCount, kRatio };

struct Unit {
  const char* suffix;
  double factor;
  std::vector<Kind> kinds;
};

// Longest suffixes first so that "rad_s" wins over "s" and "c_m" over "m".
const std::vector<Unit>& units() {
  static const std::vector<Unit> table = {
      {"per_cm3", 1e6, {Kind::kDensity}},
      {"per_m3", 1.0, {Kind::kDensity}},
      {"factor", 1.0, {Kind::kRatio}},
      {"rad_s", 1.0, {Kind::kAngularRate, Kind::kRabi}},
      {"count", 1.0, {Kind::kCount}},
      {"frac", 1.0, {Kind::kRatio}},
      {"khz", 1e3, {Kind::kHz, Kind::kAngularRate, Kind::kRabi}},
      {"mhz", 1e6, {Kind::kHz, Kind::kAngularRate, Kind::kRabi}},
      {"c_m", 1.0, {Kind::kDipole}},
      {"rel", 1.0, {Kind::kRatio}},
      {"rad", 1.0, {Kind::kAngle}},
      {"hz", 1.0, {Kind::kHz, Kind::kAngularRate, Kind::kRabi}},
      {"ms", 1e-3, {Kind::kTime}},
      {"us", 1e-6, {Kind::kTime}},
      {"nm", 1e-9, {Kind::kLength}},
      {"s", 1.0, {Kind::kTime}},
      {"m", 1.0, {Kind::kLength}},
  };
  return table;
}

bool is_hz_unit(const std::string& suffix) { return suffix == "hz" || suffix == "khz" || suffix == "mhz"; }

struct Quantity {
  double value;
  std::string suffix;
  double factor;
  std::string key;
};

using Setter = std::function<void(RunConfig&, const Quantity&)>;

struct Field {
  Kind kind;
  Setter set;
};

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

double positive(const std::string& key, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(key, "must be finite and > 0");
  return v;
}

double non_negative(const std::string& key, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) fail(key, "must be finite and >= 0");
  return v;
}

double finite(const std::string& key, double v) {
  if (!std::isfinite(v)) fail(key, "must be finite");
  return v;
}

// Angular rate: rad/s as is, Hz-family keys are cyclic frequencies.
double angular(const Quantity& q) {
  const double v = q.value * q.factor;
  return is_hz_unit(q.suffix) ? kTwoPi * v : v;
}

FieldConfig& field_of(RunConfig& cfg, const std::string& name) {
  if (name == "probe") return cfg.probe;
  if (name == "coupling") return cfg.coupling;
  return cfg.auxiliary;
}

// Numeric keys without their unit suffix.
std::optional<Field> lookup_numeric(const std::string& stem, const std::string& key) {
  static const std::map<std::string, Field> fixed = {
      {"material.density", {Kind::kDensity, [](RunConfig& c, const Quantity& q) {
         c.density_per_m3 = positive(q.key, q.value * q.factor);
       }}},
      {"material.dipole", {Kind::kDipole, [](RunConfig& c, const Quantity& q) {
         c.dipole_c_m = positive(q.key, q.value * q.factor);
       }}},
      {"material.probe_wavelength", {Kind::kLength, [](RunConfig& c, const Quantity& q) {
         c.probe_wavelength_m = positive(q.key, q.value * q.factor);
       }}},
      {"grid.delta_min", {Kind::kAngularRate, [](RunConfig& c, const Quantity& q) {
         c.delta_min = finite(q.key, angular(q));
       }}},
      {"grid.delta_max", {Kind::kAngularRate, [](RunConfig& c, const Quantity& q) {
         c.delta_max = finite(q.key, angular(q));
       }}},
      {"grid.points", {Kind::kCount, [](RunConfig& c, const Quantity& q) {
         c.points = static_cast<std::size_t>(q.value);
       }}},
      {"solver.tol", {Kind::kRatio, [](RunConfig& c, const Quantity& q) {
         c.tol = positive(q.key, q.value);
       }}},
      {"solver.t_end", {Kind::kTime, [](RunConfig& c, const Quantity& q) {
         c.t_end_s = non_negative(q.key, q.value * q.factor);
       }}},
      {"solver.samples", {Kind::kCount, [](RunConfig& c, const Quantity& q) {
         c.samples = static_cast<std::size_t>(q.value);
       }}},
      {"solver.fd_step", {Kind::kAngularRate, [](RunConfig& c, const Quantity& q) {
         c.fd_step = positive(q.key, angular(q));
       }}},
      {"debug.analytic_gamma52", {Kind::kRatio, [](RunConfig& c, const Quantity& q) {
         c.analytic_gamma52_factor = positive(q.key, q.value);
       }}},
  };
  if (auto it = fixed.find(stem); it != fixed.end()) return it->second;

  static const std::regex field_re(R"(drives\.(probe|coupling|auxiliary)\.(rabi|phase|detuning))");
  static const std::regex level_re(R"(material\.level([1-6])\.t1)");
  static const std::regex pair_re(R"(material\.(dephasing|branching)\.([1-6])_([1-6]))");
  std::smatch m;
  if (std::regex_match(stem, m, field_re)) {
    const std::string name = m[1], what = m[2];
    if (what == "rabi") {
      return Field{Kind::kRabi, [name, key](RunConfig& c, const Quantity& q) {
                     auto& f = field_of(c, name);
                     f.rabi_value = non_negative(key, q.value * q.factor);
                     f.rabi_in_hz = is_hz_unit(q.suffix);
                   }};
    }
    if (what == "phase") {
      return Field{Kind::kAngle, [name, key](RunConfig& c, const Quantity& q) {
                     field_of(c, name).phase = finite(key, q.value);
                   }};
    }
    return Field{Kind::kAngularRate, [name, key](RunConfig& c, const Quantity& q) {
                   field_of(c, name).detuning = finite(key, angular(q));
                 }};
  }
  if (std::regex_match(stem, m, level_re)) {
    const int lv = std::stoi(m[1]) - 1;
    return Field{Kind::kTime, [lv, key](RunConfig& c, const Quantity& q) {
                   c.lifetimes_s[lv] = positive(key, q.value * q.factor);
                 }};
  }
  if (std::regex_match(stem, m, pair_re)) {
    const int i = std::stoi(m[2]) - 1, j = std::stoi(m[3]) - 1;
    if (i == j) fail(key, "needs two distinct levels");
    if (m[1] == "dephasing") {
      return Field{Kind::kHz, [i, j, key](RunConfig& c, const Quantity& q) {
                     c.dephasing_hz[i][j] = c.dephasing_hz[j][i] = non_negative(key, q.value * q.factor);
                   }};
    }
    return Field{Kind::kRatio, [i, j, key](RunConfig& c, const Quantity& q) {
                   c.branching_frac[i][j] = non_negative(key, q.value);
                 }};
  }
  return std::nullopt;
}

std::string require_string(const std::string& key, const json& v) {
  if (!v.is_string()) fail(key, "expects a string");
  return v.get<std::string>();
}

bool apply_string(RunConfig& cfg, const std::string& key, const json& v) {
  if (key == "backend") {
    try {
      cfg.backend = backend_from_string(require_string(key, v));
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  } else if (key == "material.rate_convention") {
    try {
      cfg.rate_convention = rate_convention_from_string(require_string(key, v));
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  } else if (key == "drives.rabi_convention") {
    try {
      cfg.rabi_convention = rabi_convention_from_string(require_string(key, v));
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  } else if (key == "solver.initial") {
    static const std::regex re("uniform|level[1-6]");
    auto s = require_string(key, v);
    if (!std::regex_match(s, re)) fail(key, "expects 'uniform' or 'level1'..'level6'");
    cfg.initial = std::move(s);
  } else if (key == "output.dir") {
    cfg.output_dir = require_string(key, v);
  } else {
    return false;
  }
  return true;
}

void apply_leaf(RunConfig& cfg, const std::string& key, const json& v) {
  if (apply_string(cfg, key, v)) return;

  const auto dot = key.rfind('.');
  const std::string leaf = dot == std::string::npos ? key : key.substr(dot + 1);
  const Unit* unit = nullptr;
  for (const auto& u : units()) {
    const std::string tail = std::string("_") + u.suffix;
    if (leaf.size() > tail.size() && leaf.ends_with(tail)) {
      unit = &u;
      break;
    }
  }
  if (unit == nullptr) fail(key, "unknown key or missing unit suffix");
  const std::string stem = key.substr(0, key.size() - std::char_traits<char>::length(unit->suffix) - 1);
  const auto field = lookup_numeric(stem, key);
  if (!field) fail(key, "unknown key");
  if (std::find(unit->kinds.begin(), unit->kinds.end(), field->kind) == unit->kinds.end()) {
    fail(key, std::string("unit '") + unit->suffix + "' does not fit this quantity");
  }
  if (!v.is_number()) fail(key, "expects a number");
  const double value = v.get<double>();
  if (field->kind == Kind::kCount) {
    if (!v.is_number_integer() || value < 0.0) fail(key, "expects a non-negative integer");
  }
  field->set(cfg, Quantity{value, unit->suffix, unit->factor, key});
}

void flatten(const json& node, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  if (node.is_object()) {
    for (const auto& [k, v] : node.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  if (prefix.empty()) throw ConfigError("config document must be an object");
  out.emplace_back(prefix, node);
}

// Any branching key for level m replaces that level's whole row.
void apply_fragment(RunConfig& cfg, const json& doc) {
  std::vector<std::pair<std::string, json>> leaves;
  flatten(doc, "", leaves);
  static const std::regex branch_re(R"(material\.branching\.([1-6])_[1-6]_frac)");
  std::set<int> replaced;
  for (const auto& [key, v] : leaves) {
    std::smatch m;
    if (std::regex_match(key, m, branch_re)) replaced.insert(std::stoi(m[1]) - 1);
  }
  for (int lv : replaced) cfg.branching_frac[lv].fill(0.0);
  for (const auto& [key, v] : leaves) apply_leaf(cfg, key, v);
}

std::string format_index_pair(int i, int j) { return std::to_string(i + 1) + "_" + std::to_string(j + 1); }

}  // namespace

RunConfig::RunConfig() {
  // Equal branching into every lower level; level 1 is the bottom.
  for (int m = 1; m < 6; ++m) {
    for (int k = 0; k < m; ++k) branching_frac[m][k] = 1.0 / static_cast<double>(m);
  }
  dephasing_hz[2][1] = dephasing_hz[1][2] = 2e3;
  dephasing_hz[4][1] = dephasing_hz[1][4] = 9e3;
  dephasing_hz[4][2] = dephasing_hz[2][4] = 9e3;
}

MaterialParams RunConfig::material() const {
  MaterialParams mat;
  mat.density_per_m3 = density_per_m3;
  mat.dipole_c_m = dipole_c_m;
  mat.probe_wavelength_m = probe_wavelength_m;
  mat.rate_convention = rate_convention;
  auto& lv = mat.levels;
  lv = LevelSystem::isolated(6);
  lv.lifetimes_s.assign(lifetimes_s.begin(), lifetimes_s.end());
  for (int m = 0; m < 6; ++m) {
    std::vector<std::pair<int, double>> fractions;
    for (int k = 0; k < 6; ++k) {
      if (branching_frac[m][k] > 0.0) fractions.emplace_back(k + 1, branching_frac[m][k]);
    }
    try {
      lv.set_branching_fractions(m + 1, fractions);
    } catch (const ConfigError& e) {
      throw ConfigError("config key 'material.branching': " + std::string(e.what()));
    }
    for (int k = 0; k < m; ++k) lv.set_dephasing_hz(m + 1, k + 1, dephasing_hz[m][k]);
  }
  mat.refresh();
  mat.validate();
  return mat;
}

DriveSet RunConfig::drive_set() const {
  DriveSet d;
  d.probe = std::polar(probe.rabi(rabi_convention), probe.phase);
  d.coupling = std::polar(coupling.rabi(rabi_convention), coupling.phase);
  d.auxiliary = std::polar(auxiliary.rabi(rabi_convention), auxiliary.phase);
  d.coupling_detuning = coupling.detuning;
  d.auxiliary_detuning = auxiliary.detuning;
  return d;
}

DetuningGrid RunConfig::grid() const {
  DetuningGrid g{delta_min, delta_max, points};
  if (points < 2) throw ConfigError("config key 'grid.points_count': detuning grid needs at least 2 points");
  if (!(delta_max > delta_min)) {
    throw ConfigError("config keys 'grid.delta_min'/'grid.delta_max': need delta_min < delta_max");
  }
  g.validate();
  return g;
}

BackendOptions RunConfig::backend_options(std::size_t jobs) const {
  BackendOptions o;
  o.jobs = jobs;
  o.analytic_gamma52_factor = analytic_gamma52_factor;
  return o;
}

double RunConfig::fd_step_or_default() const {
  if (fd_step) return *fd_step;
  return material().gamma_between(3, 2) / 100.0;
}

ordered_json RunConfig::resolved() const {
  ordered_json doc;
  doc["backend"] = to_string(backend);

  auto& m = doc["material"];
  m["density_per_m3"] = density_per_m3;
  m["dipole_c_m"] = dipole_c_m;
  m["probe_wavelength_m"] = probe_wavelength_m;
  m["rate_convention"] = to_string(rate_convention);
  for (int i = 0; i < 6; ++i) m["level" + std::to_string(i + 1)]["t1_s"] = lifetimes_s[i];
  m["dephasing"] = ordered_json::object();
  m["branching"] = ordered_json::object();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < i; ++j) {
      if (dephasing_hz[i][j] != 0.0) m["dephasing"][format_index_pair(i, j) + "_hz"] = dephasing_hz[i][j];
    }
    for (int j = 0; j < 6; ++j) {
      if (branching_frac[i][j] != 0.0) {
        m["branching"][format_index_pair(i, j) + "_frac"] = branching_frac[i][j];
      }
    }
  }

  auto& d = doc["drives"];
  d["rabi_convention"] = to_string(rabi_convention);
  for (const auto& [name, f] : {std::pair{"probe", &probe}, {"coupling", &coupling}, {"auxiliary", &auxiliary}}) {
    d[name]["rabi_rad_s"] = f->rabi(rabi_convention);
    d[name]["phase_rad"] = f->phase;
    d[name]["detuning_rad_s"] = f->detuning;
  }

  doc["grid"] = {{"delta_min_rad_s", delta_min}, {"delta_max_rad_s", delta_max}, {"points_count", points}};
  doc["solver"] = {{"tol_rel", tol},
                   {"t_end_s", t_end_s},
                   {"samples_count", samples},
                   {"initial", initial},
                   {"fd_step_rad_s", fd_step_or_default()}};
  doc["debug"] = {{"analytic_gamma52_factor", analytic_gamma52_factor}};
  doc["output"] = {{"dir", output_dir}};
  return doc;
}

void apply_document(RunConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be an object");
  if (auto it = doc.find("resolved"); it != doc.end()) {
    apply_fragment(cfg, *it);
    return;
  }
  apply_fragment(cfg, doc);
}

namespace {

void merge_assignment(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("override path '" + path + "' has an empty component");
    parts.push_back(part);
  }
  json* node = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    node = &(*node)[parts[i]];
    if (!node->is_object()) *node = json::object();
  }
  (*node)[parts.back()] = std::move(value);
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& assignment) { apply_overrides(cfg, {assignment}); }

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& assignments) {
  if (assignments.empty()) return;
  json doc = json::object();
  for (const auto& a : assignments) merge_assignment(doc, a);
  apply_fragment(cfg, doc);
}

RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file '" + *path + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config file '" + *path + "' is not valid JSON");
    apply_document(cfg, doc);
  }
  apply_overrides(cfg, overrides);
  return cfg;
}

}  // namespace eit::cli
