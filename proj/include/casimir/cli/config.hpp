#ifndef CASIMIR_CLI_CONFIG_HPP
#define CASIMIR_CLI_CONFIG_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "casimir/atoms.hpp"
#include "casimir/errors.hpp"
#include "casimir/geometry.hpp"
#include "casimir/potentials.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/units.hpp"

// Run configuration: a plain-text file of `section.key = value` lines.
//
//   units.system      natural | cgs
//   units.length_cm   natural length unit in cm (cgs mode only; default 1e-7)
//
//   atom_a.file       path to an atom block (relative to the config file)
//   atom_a.transition <k_p0> <mu2>          repeatable
//   atom_a.gamma      <damping>
//   atom_a.response   dynamic | static
//   atom_b.*          as atom_a, or  atom_b.same_as = atom_a
//
//   geometry.R        free-space separation                    (one geometry mode:
//   geometry.atom_a   x y z   and   geometry.atom_b  x y z      free space or wall)
//
//   sweep.variable    R (free space) | scale | lift (wall)
//   sweep.start, sweep.stop, sweep.count, sweep.spacing (log | linear)
//
//   temperature.T       value                        (exactly one of the three)
//   temperature.lambda  thermal length
//   temperature.start, .stop, .count, .spacing
//
//   run.method        auto | full | asymptotic | all
//   regime.margin     factor for "<<" (default 10)
//   quad.tol, quad.eta0, quad.terms
//   output.path       file or '-', output.timestamp  true | false

namespace casimir::cli {

enum class MethodChoice { automatic, full, asymptotic, all };

inline std::string_view to_string(MethodChoice m) {
  switch (m) {
    case MethodChoice::automatic: return "auto";
    case MethodChoice::full: return "full";
    case MethodChoice::asymptotic: return "asymptotic";
    case MethodChoice::all: return "all";
  }
  return "?";
}

enum class Spacing { log, linear };
enum class SweepVariable { separation, scale, lift };

inline std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::separation: return "R";
    case SweepVariable::scale: return "scale";
    case SweepVariable::lift: return "lift";
  }
  return "?";
}

struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  Spacing spacing = Spacing::log;

  std::vector<double> values() const {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / (count - 1);
      out[i] = spacing == Spacing::log ? start * std::pow(stop / start, t)
                                       : start + (stop - start) * t;
    }
    return out;
  }
};

struct RunConfig {
  UnitSystem units;
  std::optional<AtomModel> atom_a;
  std::optional<AtomModel> atom_b;

  bool wall = false;
  double separation = 0.0;  // free space
  Vec3 position_a = Vec3::Zero();
  Vec3 position_b = Vec3::Zero();
  std::optional<Range> sweep;
  SweepVariable sweep_variable = SweepVariable::separation;

  std::optional<double> temperature;  // natural units
  std::optional<Range> temperature_sweep;

  MethodChoice method = MethodChoice::automatic;
  double regime_margin = default_regime_margin;
  QuadratureOptions quad;
  std::string output_path = "-";
  bool timestamp = false;
  std::string origin = "config";

  const AtomModel& a() const { return *atom_a; }
  const AtomModel& b() const { return *atom_b; }
};

/// Overrides applied from the command line after the file has been read.
struct ConfigOverrides {
  std::optional<UnitMode> units;
  std::optional<double> tolerance;
  std::optional<std::string> output_path;
};

namespace detail {

struct Entry {
  std::string value;
  std::string where;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const Entry& e, const std::string& key) {
  std::istringstream in(e.value);
  double v = 0.0;
  std::string rest;
  if (!(in >> v) || (in >> rest) || !std::isfinite(v))
    throw ConfigError(e.where, key + ": expected a number, got '" + e.value + "'");
  return v;
}

inline int to_int(const Entry& e, const std::string& key) {
  const double v = to_double(e, key);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ConfigError(e.where, key + ": expected an integer, got '" + e.value + "'");
  return static_cast<int>(v);
}

inline bool to_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  throw ConfigError(e.where, key + ": expected true or false");
}

inline Vec3 to_vec3(const Entry& e, const std::string& key) {
  std::istringstream in(e.value);
  Vec3 v;
  std::string rest;
  if (!(in >> v.x() >> v.y() >> v.z()) || (in >> rest) || !v.allFinite())
    throw ConfigError(e.where, key + ": expected three numbers 'x y z'");
  return v;
}

inline Spacing to_spacing(const Entry& e, const std::string& key) {
  if (e.value == "log") return Spacing::log;
  if (e.value == "linear") return Spacing::linear;
  throw ConfigError(e.where, key + ": spacing must be 'log' or 'linear'");
}

class Table {
 public:
  void add(const std::string& key, Entry e) {
    if (repeatable(key)) {
      multi_[key].push_back(std::move(e));
      return;
    }
    if (single_.contains(key)) throw ConfigError(e.where, "duplicate key '" + key + "'");
    single_[key] = std::move(e);
  }

  const Entry* get(const std::string& key) {
    used_.insert(key);
    auto it = single_.find(key);
    return it == single_.end() ? nullptr : &it->second;
  }

  const std::vector<Entry>& all(const std::string& key) {
    used_.insert(key);
    static const std::vector<Entry> none;
    auto it = multi_.find(key);
    return it == multi_.end() ? none : it->second;
  }

  bool has_prefix(const std::string& prefix) const {
    for (const auto& [k, _] : single_)
      if (k.starts_with(prefix)) return true;
    for (const auto& [k, _] : multi_)
      if (k.starts_with(prefix)) return true;
    return false;
  }

  void reject_unused() const {
    for (const auto& [k, e] : single_)
      if (!used_.contains(k)) throw ConfigError(e.where, "unknown key '" + k + "'");
    for (const auto& [k, v] : multi_)
      if (!used_.contains(k)) throw ConfigError(v.front().where, "unknown key '" + k + "'");
  }

 private:
  static bool repeatable(const std::string& key) { return key.ends_with(".transition"); }

  std::map<std::string, Entry> single_;
  std::map<std::string, std::vector<Entry>> multi_;
  std::set<std::string> used_;
};

inline Table tokenize(std::string_view text, const std::string& origin) {
  Table t;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected 'section.key = value'");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
      throw ConfigError(where, "key '" + key + "' is not of the form section.key");
    if (value.empty()) throw ConfigError(where, "empty value for '" + key + "'");
    t.add(key, {value, where});
  }
  return t;
}

inline Range read_range(Table& t, const std::string& section, const std::string& where) {
  const Entry* start = t.get(section + ".start");
  const Entry* stop = t.get(section + ".stop");
  const Entry* count = t.get(section + ".count");
  const Entry* spacing = t.get(section + ".spacing");
  if (!start || !stop || !count)
    throw ConfigError(where, section + ": sweeps need start, stop and count");
  Range r;
  r.start = to_double(*start, section + ".start");
  r.stop = to_double(*stop, section + ".stop");
  r.count = to_int(*count, section + ".count");
  if (spacing) r.spacing = to_spacing(*spacing, section + ".spacing");
  if (r.count < 2) throw ConfigError(count->where, section + ".count must be >= 2");
  if (!(r.start > 0.0) || !(r.stop > 0.0))
    throw ConfigError(start->where, section + ": sweep bounds must be positive");
  return r;
}

inline AtomModel read_atom(Table& t, const std::string& name, const UnitSystem& units,
                           const std::filesystem::path& base, const std::string& origin) {
  const Entry* file = t.get(name + ".file");
  const auto& transitions = t.all(name + ".transition");
  const Entry* gamma = t.get(name + ".gamma");
  const Entry* response = t.get(name + ".response");
  if (file) {
    if (!transitions.empty() || gamma || response)
      throw ConfigError(file->where, name + ": give either a file or inline lines, not both");
    std::filesystem::path p = file->value;
    if (p.is_relative()) p = base / p;
    std::ifstream in(p);
    if (!in) throw ConfigError(file->where, name + ".file: cannot open '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_atom_model(ss.str(), units, p.string());
  }
  if (transitions.empty())
    throw ConfigError(origin, "missing atom block '" + name + "' (need " + name +
                                  ".file or " + name + ".transition)");
  // Reassemble the inline keys into an atom block so both forms share one parser.
  std::string block;
  for (const auto& e : transitions) block += "transition " + e.value + "\n";
  if (gamma) block += "gamma " + gamma->value + "\n";
  if (response) block += "response " + response->value + "\n";
  return parse_atom_model(block, units, transitions.front().where + " (" + name + ")");
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text, const std::string& origin = "config",
                              const ConfigOverrides& over = {},
                              const std::filesystem::path& base = ".") {
  detail::Table t = detail::tokenize(text, origin);
  RunConfig cfg;
  cfg.origin = origin;

  UnitMode mode = UnitMode::natural;
  if (const auto* e = t.get("units.system")) {
    try {
      mode = parse_unit_mode(e->value);
    } catch (const ConfigError& err) {
      throw ConfigError(e->where, err.what());
    }
  }
  if (over.units) mode = *over.units;
  double length_cm = 1e-7;
  if (const auto* e = t.get("units.length_cm")) {
    length_cm = detail::to_double(*e, "units.length_cm");
    if (!(length_cm > 0.0)) throw ConfigError(e->where, "units.length_cm must be > 0");
  }
  cfg.units = UnitSystem(mode, length_cm);
  const UnitSystem& u = cfg.units;

  cfg.atom_a = detail::read_atom(t, "atom_a", u, base, origin);
  if (const auto* e = t.get("atom_b.same_as")) {
    if (e->value != "atom_a") throw ConfigError(e->where, "atom_b.same_as must be 'atom_a'");
    if (!t.all("atom_b.transition").empty() || t.get("atom_b.file") || t.get("atom_b.gamma") ||
        t.get("atom_b.response"))
      throw ConfigError(e->where, "atom_b.same_as excludes other atom_b keys");
    cfg.atom_b = cfg.atom_a;
  } else {
    cfg.atom_b = detail::read_atom(t, "atom_b", u, base, origin);
  }

  // Geometry: exactly one mode.
  const auto* r = t.get("geometry.R");
  const auto* pa = t.get("geometry.atom_a");
  const auto* pb = t.get("geometry.atom_b");
  const bool has_sweep = t.has_prefix("sweep.");
  const auto* var = t.get("sweep.variable");
  if ((pa != nullptr) != (pb != nullptr))
    throw ConfigError((pa ? pa : pb)->where, "wall geometry needs both geometry.atom_a and geometry.atom_b");
  cfg.wall = pa != nullptr;
  if (cfg.wall && r) throw ConfigError(r->where, "exactly one geometry mode: geometry.R or wall positions");
  if (has_sweep) {
    const std::string where = var ? var->where : origin;
    cfg.sweep = detail::read_range(t, "sweep", where);
    const std::string v = var ? var->value : (cfg.wall ? "scale" : "R");
    if (v == "R") cfg.sweep_variable = SweepVariable::separation;
    else if (v == "scale") cfg.sweep_variable = SweepVariable::scale;
    else if (v == "lift") cfg.sweep_variable = SweepVariable::lift;
    else throw ConfigError(where, "sweep.variable must be R, scale or lift");
    if (cfg.wall == (cfg.sweep_variable == SweepVariable::separation))
      throw ConfigError(where, cfg.wall ? "wall sweeps use sweep.variable = scale or lift"
                                        : "free-space sweeps use sweep.variable = R");
    if (!cfg.wall && r) throw ConfigError(r->where, "exactly one geometry mode: geometry.R or sweep.*");
    if (cfg.sweep_variable != SweepVariable::scale) {
      cfg.sweep->start = u.length_in(cfg.sweep->start);
      cfg.sweep->stop = u.length_in(cfg.sweep->stop);
    }
  }
  if (cfg.wall) {
    cfg.position_a = detail::to_vec3(*pa, "geometry.atom_a") / u.length_factor();
    cfg.position_b = detail::to_vec3(*pb, "geometry.atom_b") / u.length_factor();
    try {
      WallConfiguration check(cfg.position_a, cfg.position_b);
    } catch (const GeometryError& e) {
      throw ConfigError(pa->where, e.what());
    }
  } else if (r) {
    cfg.separation = u.length_in(detail::to_double(*r, "geometry.R"));
    if (!(cfg.separation > 0.0)) throw ConfigError(r->where, "geometry.R must be > 0");
  } else if (!cfg.sweep) {
    throw ConfigError(origin, "missing geometry (geometry.R, geometry.atom_a/atom_b or sweep.*)");
  }

  // Temperature.
  const auto* tv = t.get("temperature.T");
  const auto* tl = t.get("temperature.lambda");
  const bool t_sweep = t.get("temperature.start") || t.get("temperature.stop") ||
                       t.get("temperature.count");
  if ((tv != nullptr) + (tl != nullptr) + t_sweep != 1)
    throw ConfigError(origin, "give exactly one of temperature.T, temperature.lambda or a temperature sweep");
  if (tv) {
    const double v = detail::to_double(*tv, "temperature.T");
    if (v < 0.0) throw ConfigError(tv->where, "temperature must be >= 0");
    cfg.temperature = u.temperature_in(v);
  } else if (tl) {
    const double v = detail::to_double(*tl, "temperature.lambda");
    if (!(v > 0.0)) throw ConfigError(tl->where, "thermal length must be > 0");
    cfg.temperature = ThermalBath::from_thermal_length(u.length_in(v)).temperature();
  } else {
    cfg.temperature_sweep = detail::read_range(t, "temperature", origin);
    cfg.temperature_sweep->start = u.temperature_in(cfg.temperature_sweep->start);
    cfg.temperature_sweep->stop = u.temperature_in(cfg.temperature_sweep->stop);
  }

  if (const auto* e = t.get("run.method")) {
    if (e->value == "auto") cfg.method = MethodChoice::automatic;
    else if (e->value == "full") cfg.method = MethodChoice::full;
    else if (e->value == "asymptotic") cfg.method = MethodChoice::asymptotic;
    else if (e->value == "all") cfg.method = MethodChoice::all;
    else throw ConfigError(e->where, "run.method must be auto, full, asymptotic or all");
  }
  if (const auto* e = t.get("regime.margin")) {
    cfg.regime_margin = detail::to_double(*e, "regime.margin");
    if (!(cfg.regime_margin >= 1.0)) throw ConfigError(e->where, "regime.margin must be >= 1");
  }
  if (const auto* e = t.get("quad.tol")) cfg.quad.tolerance = detail::to_double(*e, "quad.tol");
  if (const auto* e = t.get("quad.eta0")) cfg.quad.eta_start = detail::to_double(*e, "quad.eta0");
  if (const auto* e = t.get("quad.terms")) {
    const int n = detail::to_int(*e, "quad.terms");
    if (n < 1) throw ConfigError(e->where, "quad.terms must be >= 1");
    cfg.quad.matsubara_terms = static_cast<std::size_t>(n);
  }
  if (over.tolerance) cfg.quad.tolerance = *over.tolerance;
  try {
    cfg.quad.validate();
  } catch (const DomainError& e) {
    throw ConfigError(origin, std::string("quad: ") + e.what());
  }
  if (const auto* e = t.get("output.path")) cfg.output_path = e->value;
  if (over.output_path) cfg.output_path = *over.output_path;
  if (const auto* e = t.get("output.timestamp")) cfg.timestamp = detail::to_bool(*e, "output.timestamp");

  t.reject_unused();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& over = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), over, path.parent_path());
}

}  // namespace casimir::cli

#endif  // CASIMIR_CLI_CONFIG_HPP
