#ifndef CASIMIR_CLI_COMPARE_HPP
#define CASIMIR_CLI_COMPARE_HPP

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "casimir/cli/sweep.hpp"

namespace casimir::cli {

inline constexpr const char* compare_schema = "casimir-compare/1";

/// A pair of methods whose relative deviation is reported, with the tolerance beyond
/// which it is flagged. A tolerance of 0 means "combined error estimates".
struct DeclaredPair {
  Method first;
  Method second;
  double tolerance;
};

inline const std::vector<DeclaredPair>& declared_pairs() {
  static const std::vector<DeclaredPair> pairs{
      {Method::full_integral, Method::matsubara_oracle, 0.0},
      {Method::full_integral, Method::near_zone, 2e-2},
      {Method::full_integral, Method::far_zone_qr, 1e-2},
      {Method::full_integral, Method::zero_t_far, 1e-2},
      {Method::far_zone_qr, Method::limit_high_t, 1e-3},
      {Method::far_zone_qr, Method::limit_zero_t, 1e-3},
      {Method::far_zone_qr, Method::limit_mixed, 1e-2},
      {Method::far_zone_qr, Method::zero_t_far, 1e-3},
  };
  return pairs;
}

inline constexpr std::array<Method, 8> all_methods{
    Method::full_integral, Method::matsubara_oracle, Method::near_zone, Method::far_zone_qr,
    Method::zero_t_far,    Method::limit_high_t,     Method::limit_zero_t, Method::limit_mixed};

struct Comparison {
  std::map<Method, PotentialResult> results;
  std::map<Method, std::string> failures;
  struct Deviation {
    DeclaredPair pair;
    double relative;
    bool flagged;
  };
  std::vector<Deviation> deviations;
};

inline Comparison compare_point(const RunConfig& cfg, const std::vector<Point>& points, std::size_t i) {
  Comparison c;
  for (Method m : applicable_methods(cfg, points[i])) {
    Row row = evaluate_row(cfg, points, i, m, false);
    if (row.result) c.results.emplace(m, std::move(*row.result));
    else c.failures.emplace(m, row.failure);
  }
  for (const DeclaredPair& p : declared_pairs()) {
    auto x = c.results.find(p.first), y = c.results.find(p.second);
    if (x == c.results.end() || y == c.results.end()) continue;
    const double a = x->second.energy, b = y->second.energy;
    const double rel = std::abs(a - b) / std::abs(a);
    const bool flagged =
        p.tolerance > 0.0
            ? !(rel <= p.tolerance)
            : !(std::abs(a - b) <= x->second.error_estimate + y->second.error_estimate);
    c.deviations.push_back({p, rel, flagged});
  }
  return c;
}

/// Evaluates every applicable method at every point and writes one row per point:
/// W and error estimate of each method (empty when not applicable), then the relative
/// deviation of each declared pair, then the list of flagged pairs.
/// Returns 3 if any method failed numerically, else 0; flags are reported, not fatal.
inline int compare_methods(const RunConfig& cfg, unsigned jobs, std::ostream& out, std::ostream& log) {
  const std::vector<Point> points = sweep_points(cfg);
  std::vector<Comparison> table(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t i) { table[i] = compare_point(cfg, points, i); });

  const UnitSystem& u = cfg.units;
  write_preamble(out, cfg, compare_schema);
  out << "# deviations: |W_first - W_second| / |W_first|; tolerance 'est' = combined error estimates\n";
  out << (cfg.wall ? "R,Rbar,T,lambda_T,regime" : "R,T,lambda_T,regime");
  for (Method m : all_methods) out << ",W[" << to_string(m) << "],err[" << to_string(m) << "]";
  for (const auto& p : declared_pairs())
    out << ",dev[" << to_string(p.first) << "|" << to_string(p.second) << "]";
  out << ",flags\n";

  int status = exit_ok;
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    const Comparison& c = table[i];
    out << point_prefix(cfg, p);
    out << to_string(p.wall ? classify_regime(*p.wall, p.bath(), cfg.a(), cfg.b(), cfg.regime_margin)
                            : classify_regime(p.separation, p.bath(), cfg.a(), cfg.b(), cfg.regime_margin));
    for (Method m : all_methods) {
      auto it = c.results.find(m);
      if (it == c.results.end()) out << ",,";
      else out << "," << fmt(u.energy_out(it->second.energy)) << "," << fmt(u.energy_out(it->second.error_estimate));
    }
    std::string flags;
    for (const auto& pair : declared_pairs()) {
      out << ",";
      for (const auto& d : c.deviations) {
        if (d.pair.first != pair.first || d.pair.second != pair.second) continue;
        out << fmt(d.relative);
        if (d.flagged) {
          if (!flags.empty()) flags += ";";
          flags += std::string(to_string(pair.first)) + "|" + std::string(to_string(pair.second)) +
                   ">" + (pair.tolerance > 0.0 ? fmt(pair.tolerance) : std::string("est"));
          ++flagged;
        }
      }
    }
    out << "," << flags << "\n";
    for (const auto& [m, why] : c.failures) {
      status = exit_numerical;
      log << "point " << i << " (" << to_string(m) << "): " << why << "\n";
    }
  }
  if (flagged) log << flagged << " deviation(s) exceed their declared tolerance\n";
  out.flush();
  return status;
}

}  // namespace casimir::cli

#endif  // CASIMIR_CLI_COMPARE_HPP
