#ifndef CASIMIR_ATOMS_HPP
#define CASIMIR_ATOMS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/units.hpp"

// All quantities below are in natural units (hbar = c = k_B = 1).

namespace casimir {

/// One ground-state transition: wavenumber k_p0 = (E_p - E_0)/(hbar c) and |mu_p0|^2.
struct Transition {
  double wavenumber;
  double dipole_squared;
};

/// How an atom responds at finite wavenumber.
///  - dynamic: full ladder sum.
///  - static_limit: alpha(k) == alpha(0) at every k (the far-zone replacement).
enum class Response { dynamic, static_limit };

/// Isotropic ground-state atom described by its transition ladder plus a damping width
/// gamma that regularizes the real-axis resonance poles.
class AtomModel {
 public:
  /// Relative fraction of min k_p0 used as damping when none is given.
  static constexpr double default_damping_fraction = 1e-3;

  explicit AtomModel(std::vector<Transition> transitions,
                     std::optional<double> damping = std::nullopt,
                     Response response = Response::dynamic)
      : transitions_(std::move(transitions)), response_(response) {
    if (transitions_.empty()) throw DomainError("atom model needs at least one transition");
    bool any_active = false;
    for (const auto& t : transitions_) {
      if (!(t.wavenumber > 0.0) || !std::isfinite(t.wavenumber))
        throw DomainError("transition wavenumber must be positive and finite");
      if (!(t.dipole_squared >= 0.0) || !std::isfinite(t.dipole_squared))
        throw DomainError("transition |mu|^2 must be non-negative and finite");
      any_active = any_active || t.dipole_squared > 0.0;
    }
    if (!any_active) throw DomainError("atom model needs a transition with |mu|^2 > 0");
    damping_ = damping.value_or(default_damping_fraction * min_wavenumber());
    if (!(damping_ >= 0.0) || !std::isfinite(damping_))
      throw DomainError("damping must be non-negative");
  }

  /// Single-transition model with alpha(0) = `static_alpha`.
  static AtomModel two_level(double wavenumber, double static_alpha,
                             std::optional<double> damping = std::nullopt) {
    return AtomModel({{wavenumber, 1.5 * static_alpha * wavenumber}}, damping);
  }

  std::span<const Transition> transitions() const noexcept { return transitions_; }
  double damping() const noexcept { return damping_; }
  Response response() const noexcept { return response_; }
  bool is_static() const noexcept { return response_ == Response::static_limit; }

  double min_wavenumber() const {
    return std::ranges::min(transitions_, {}, &Transition::wavenumber).wavenumber;
  }
  double max_wavenumber() const {
    return std::ranges::max(transitions_, {}, &Transition::wavenumber).wavenumber;
  }

  AtomModel with_damping(double gamma) const { return AtomModel(transitions_, gamma, response_); }
  AtomModel with_response(Response r) const { return AtomModel(transitions_, damping_, r); }
  AtomModel as_static() const { return with_response(Response::static_limit); }

 private:
  std::vector<Transition> transitions_;
  double damping_ = 0.0;
  Response response_ = Response::dynamic;
};

/// Thermal state of the field.
class ThermalBath {
 public:
  explicit ThermalBath(double temperature = 0.0) : temperature_(temperature) {
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
      throw DomainError("temperature must be finite and >= 0");
  }
  static ThermalBath zero() { return ThermalBath(0.0); }
  /// Bath whose thermal length equals `lambda`.
  static ThermalBath from_thermal_length(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("thermal length must be positive");
    return ThermalBath(1.0 / (2.0 * std::numbers::pi * lambda));
  }

  double temperature() const noexcept { return temperature_; }
  bool is_zero() const noexcept { return temperature_ == 0.0; }

 private:
  double temperature_;
};

/// alpha(0) = (2/3) sum |mu|^2 / k_p0. Independent of damping and of the response mode.
inline double static_polarizability(const AtomModel& atom) {
  double sum = 0.0;
  for (const auto& t : atom.transitions()) sum += t.dipole_squared / t.wavenumber;
  return 2.0 / 3.0 * sum;
}

/// Retarded (causal) polarizability
///   alpha(k) = (2/3) sum k_p0 |mu|^2 / (k_p0^2 - k^2 - i gamma k),
/// analytic in the upper half k-plane. This is the function used inside every
/// real-axis spectral integral.
inline std::complex<double> retarded_polarizability(const AtomModel& atom, double k,
                                                    double resonance_tolerance = 1e-9) {
  if (atom.is_static()) return static_polarizability(atom);
  const double gamma = atom.damping();
  std::complex<double> sum = 0.0;
  for (const auto& t : atom.transitions()) {
    if (gamma == 0.0 && std::abs(k - t.wavenumber) <= resonance_tolerance * t.wavenumber)
      throw ResonanceError("undamped polarizability evaluated at resonance k = " +
                           std::to_string(t.wavenumber));
    const double k0 = t.wavenumber;
    sum += k0 * t.dipole_squared / std::complex<double>((k0 - k) * (k0 + k), -gamma * k);
  }
  return 2.0 / 3.0 * sum;
}

/// Real part of the retarded polarizability; exactly the undamped ladder sum when gamma = 0.
inline double dynamic_polarizability(const AtomModel& atom, double k,
                                     double resonance_tolerance = 1e-9) {
  if (k < 0.0) throw DomainError("dynamic_polarizability requires k >= 0");
  return retarded_polarizability(atom, k, resonance_tolerance).real();
}

/// alpha(i xi) = (2/3) sum k_p0 |mu|^2 / (k_p0^2 + xi^2 + gamma xi); real and positive.
inline double imaginary_axis_polarizability(const AtomModel& atom, double xi) {
  if (atom.is_static()) return static_polarizability(atom);
  const double gamma = atom.damping();
  double sum = 0.0;
  for (const auto& t : atom.transitions())
    sum += t.wavenumber * t.dipole_squared /
           (t.wavenumber * t.wavenumber + xi * xi + gamma * xi);
  return 2.0 / 3.0 * sum;
}

/// coth(k / 2T) = 2 <n_k> + 1; exactly 1 at T = 0.
inline double coth_factor(double k, const ThermalBath& bath) {
  if (!(k > 0.0)) throw DomainError("coth_factor requires k > 0");
  if (bath.is_zero()) return 1.0;
  const double x = k / (2.0 * bath.temperature());
  if (x > 20.0) return 1.0 + 2.0 * std::exp(-2.0 * x);  // coth tail; avoids tanh rounding to 1
  return 1.0 / std::tanh(x);
}

/// lambda_T = 1 / (2 pi T).
inline double thermal_length(const ThermalBath& bath) {
  if (bath.is_zero()) throw DomainError("thermal length is infinite at T = 0");
  return 1.0 / (2.0 * std::numbers::pi * bath.temperature());
}

/// Warning text when k_B T >= 0.1 hbar c min(k_p0): thermal excitation of the atoms is
/// then no longer negligible. Formulas stay evaluable; this is advisory only.
inline std::optional<std::string> thermal_excitation_warning(const AtomModel& atom,
                                                             const ThermalBath& bath) {
  if (bath.temperature() >= 0.1 * atom.min_wavenumber()) {
    std::ostringstream os;
    os << "k_B T = " << bath.temperature() << " is not << hbar c k_p0 = "
       << atom.min_wavenumber() << "; thermal atomic excitation ignored";
    return os.str();
  }
  return std::nullopt;
}

/// Parses a line-oriented atom block:
///
///     # comment
///     transition <k_p0> <mu2>      (one or more)
///     gamma <damping>              (optional)
///     response dynamic|static      (optional, default dynamic)
///
/// Values are in the given unit system and converted to natural units. Errors name
/// the offending line as `<origin>:<line>`.
inline AtomModel parse_atom_model(std::string_view text, const UnitSystem& units = {},
                                  const std::string& origin = "atom") {
  std::vector<Transition> transitions;
  std::optional<double> gamma;
  Response response = Response::dynamic;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "transition") {
      double k = 0, mu2 = 0;
      if (!(ls >> k >> mu2)) throw ConfigError(where, "expected 'transition <k_p0> <mu2>'");
      transitions.push_back({units.wavenumber_in(k), units.dipole_squared_in(mu2)});
    } else if (word == "gamma") {
      double g = 0;
      if (!(ls >> g)) throw ConfigError(where, "expected 'gamma <value>'");
      gamma = units.wavenumber_in(g);
    } else if (word == "response") {
      std::string r;
      ls >> r;
      if (r == "dynamic") response = Response::dynamic;
      else if (r == "static") response = Response::static_limit;
      else throw ConfigError(where, "response must be 'dynamic' or 'static'");
    } else {
      throw ConfigError(where, "unknown keyword '" + word + "'");
    }
    std::string extra;
    if (ls >> extra) throw ConfigError(where, "trailing token '" + extra + "'");
  }
  if (transitions.empty()) throw ConfigError(origin, "no transition lines");
  try {
    return AtomModel(std::move(transitions), gamma, response);
  } catch (const DomainError& e) {
    throw ConfigError(origin, e.what());
  }
}

}  // namespace casimir

#endif  // CASIMIR_ATOMS_HPP
