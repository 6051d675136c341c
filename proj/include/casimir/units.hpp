#ifndef CASIMIR_UNITS_HPP
#define CASIMIR_UNITS_HPP

#include <numbers>
#include <string>
#include <string_view>

#include "casimir/errors.hpp"

namespace casimir {

// CODATA 2018, gaussian-cgs.
namespace cgs {
inline constexpr double hbar = 1.054571817e-27;       // erg s
inline constexpr double speed_of_light = 2.99792458e10;  // cm / s
inline constexpr double boltzmann = 1.380649e-16;     // erg / K
inline constexpr double hbar_c = hbar * speed_of_light;  // erg cm
}  // namespace cgs

enum class UnitMode { natural, gaussian_cgs };

inline std::string_view to_string(UnitMode m) {
  return m == UnitMode::natural ? "natural" : "cgs";
}

inline UnitMode parse_unit_mode(std::string_view s) {
  if (s == "natural") return UnitMode::natural;
  if (s == "cgs" || s == "gaussian-cgs") return UnitMode::gaussian_cgs;
  throw ConfigError("units", "unknown unit system '" + std::string(s) + "'");
}

/// Conversion between the internal natural units (hbar = c = k_B = 1, lengths in
/// multiples of one free length unit) and gaussian-cgs.
///
/// Internally every formula works in natural units. In cgs mode the natural length
/// unit is `length_unit_cm` centimetres, so that
///   energy unit        = hbar c / L0            (erg)
///   temperature unit   = hbar c / (k_B L0)      (K)
///   polarizability     = L0^3                   (cm^3)
///   wavenumber         = 1 / L0                 (cm^-1)
///   |mu|^2             = hbar c L0^2            (erg cm^3)
/// In natural mode all factors are 1.
class UnitSystem {
 public:
  UnitSystem() = default;
  explicit UnitSystem(UnitMode mode, double length_unit_cm = 1e-7)
      : mode_(mode), length_unit_cm_(length_unit_cm) {
    if (!(length_unit_cm > 0.0)) throw DomainError("length unit must be positive");
  }

  static UnitSystem natural() { return UnitSystem(UnitMode::natural); }
  static UnitSystem gaussian_cgs(double length_unit_cm = 1e-7) {
    return UnitSystem(UnitMode::gaussian_cgs, length_unit_cm);
  }

  UnitMode mode() const noexcept { return mode_; }
  double length_unit_cm() const noexcept { return length_unit_cm_; }

  double length_factor() const { return cgs_mode() ? length_unit_cm_ : 1.0; }
  double energy_factor() const { return cgs_mode() ? cgs::hbar_c / length_unit_cm_ : 1.0; }
  double temperature_factor() const {
    return cgs_mode() ? cgs::hbar_c / (cgs::boltzmann * length_unit_cm_) : 1.0;
  }
  double polarizability_factor() const {
    const double l = length_factor();
    return l * l * l;
  }
  double wavenumber_factor() const { return 1.0 / length_factor(); }
  double dipole_squared_factor() const {
    return cgs_mode() ? cgs::hbar_c * length_unit_cm_ * length_unit_cm_ : 1.0;
  }

  // external -> natural
  double length_in(double v) const { return v / length_factor(); }
  double energy_in(double v) const { return v / energy_factor(); }
  double temperature_in(double v) const { return v / temperature_factor(); }
  double polarizability_in(double v) const { return v / polarizability_factor(); }
  double wavenumber_in(double v) const { return v / wavenumber_factor(); }
  double dipole_squared_in(double v) const { return v / dipole_squared_factor(); }

  // natural -> external
  double length_out(double v) const { return v * length_factor(); }
  double energy_out(double v) const { return v * energy_factor(); }
  double temperature_out(double v) const { return v * temperature_factor(); }
  double polarizability_out(double v) const { return v * polarizability_factor(); }
  double wavenumber_out(double v) const { return v * wavenumber_factor(); }
  double dipole_squared_out(double v) const { return v * dipole_squared_factor(); }

  std::string length_label() const { return cgs_mode() ? "cm" : "L0"; }
  std::string energy_label() const { return cgs_mode() ? "erg" : "hbar*c/L0"; }
  std::string temperature_label() const { return cgs_mode() ? "K" : "hbar*c/(k_B*L0)"; }

 private:
  bool cgs_mode() const noexcept { return mode_ == UnitMode::gaussian_cgs; }

  UnitMode mode_ = UnitMode::natural;
  double length_unit_cm_ = 1e-7;
};

}  // namespace casimir

#endif  // CASIMIR_UNITS_HPP
