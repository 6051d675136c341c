#ifndef CASIMIR_CLI_REGIME_REPORT_HPP
#define CASIMIR_CLI_REGIME_REPORT_HPP

#include <limits>
#include <ostream>
#include <string>

#include "casimir/cli/sweep.hpp"

namespace casimir::cli {

namespace detail {

inline const char* yes_no(bool b) { return b ? "yes" : "no"; }

inline std::string limit_formula(RegimeLabel r, bool wall) {
  switch (r) {
    case RegimeLabel::near_zone:
      return "near zone (London/van der Waals): W = -(3/(pi R^6)) int alpha_A alpha_B coth sin 2kR dk, "
             "-C6/R^6 at T = 0";
    case RegimeLabel::far_low_t:
      return wall ? "zero-temperature wall limit: W = -aa[23/(4 pi R^7) + 23/(4 pi Rbar^7)] + "
                    "(aa/pi) sigma D^R D^Rbar [1/(R Rbar (R + Rbar))]"
                  : "zero-temperature far zone: W = -23 aa / (4 pi R^7)";
    case RegimeLabel::far_high_t:
      return wall ? "high-temperature limit: W = -aa T [3/R^6 + 3/Rbar^6 - "
                    "(3 sin^2 theta + 3 sin^2 theta_bar - 2)/(R^3 Rbar^3)]"
                  : "high-temperature far zone: W = -3 aa T / R^6";
    case RegimeLabel::far_mixed:
      return "mixed limit: W = -aa[23/(4 pi R^7) + 3T/Rbar^6 - "
             "T (3 sin^2 theta + 3 sin^2 theta_bar - 2)/(R^3 Rbar^3)]";
    case RegimeLabel::crossover:
      return "none (crossover: no limiting formula holds at this margin)";
  }
  return "";
}

}  // namespace detail

/// Human-readable regime analysis of every point of the configuration.
inline int regime_report(const RunConfig& cfg, std::ostream& out) {
  const UnitSystem& u = cfg.units;
  const std::vector<Point> points = sweep_points(cfg);
  const double k_min = std::min(cfg.a().min_wavenumber(), cfg.b().min_wavenumber());
  const double k_max = std::max(cfg.a().max_wavenumber(), cfg.b().max_wavenumber());
  const std::string len = " " + u.length_label();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    const ThermalBath bath = p.bath();
    const double lambda = bath.is_zero() ? std::numeric_limits<double>::infinity() : thermal_length(bath);
    const std::optional<double> rbar =
        p.wall ? std::optional<double>(p.image_separation()) : std::nullopt;
    const auto q = regime_inequalities(p.separation, rbar, bath, cfg.a(), cfg.b(), cfg.regime_margin);
    const RegimeLabel reg = classify(q, p.wall.has_value());
    const std::string m = fmt(q.margin);

    if (points.size() > 1) out << "point " << i << "\n";
    out << "  R          = " << fmt(u.length_out(p.separation)) << len << "\n";
    if (p.wall) out << "  Rbar       = " << fmt(u.length_out(*rbar)) << len << "\n";
    out << "  T          = " << fmt(u.temperature_out(p.temperature)) << " " << u.temperature_label() << "\n";
    out << "  lambda_T   = " << fmt(u.length_out(lambda)) << len << "\n";
    out << "  atomic wavelength scale 1/k_min = " << fmt(u.length_out(1.0 / k_min)) << len
        << ", 1/k_max = " << fmt(u.length_out(1.0 / k_max)) << len << "\n";
    out << "  inequalities (margin " << m << "):\n";
    out << "    near zone   R k_max <= 1/" << m << "   : " << detail::yes_no(q.near) << "\n";
    out << "    far zone    R k_min >= " << m << "     : " << detail::yes_no(q.far) << "\n";
    out << "    R    << lambda_T               : " << detail::yes_no(q.direct_low) << "\n";
    out << "    R    >> lambda_T               : " << detail::yes_no(q.direct_high) << "\n";
    if (p.wall) {
      out << "    Rbar << lambda_T               : " << detail::yes_no(q.image_low) << "\n";
      out << "    Rbar >> lambda_T               : " << detail::yes_no(q.image_high) << "\n";
    }
    out << "  regime: " << to_string(reg) << "\n";
    out << "  recommended method: " << to_string(automatic_method(cfg, p)) << "\n";
    out << "  limiting formula: " << detail::limit_formula(reg, p.wall.has_value()) << "\n";
    if (reg == RegimeLabel::far_mixed)
      out << "  note: direct term dominates; the wall terms are negligible (as in free space)\n";
    if (bath.temperature() >= 0.1 * k_min)
      out << "  warning: k_B T is not << the atomic excitation energy\n";
  }
  return exit_ok;
}

}  // namespace casimir::cli

#endif  // CASIMIR_CLI_REGIME_REPORT_HPP
