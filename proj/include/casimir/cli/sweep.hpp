#ifndef CASIMIR_CLI_SWEEP_HPP
#define CASIMIR_CLI_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "casimir/cli/config.hpp"
#include "casimir/matsubara.hpp"
#include "casimir/potentials.hpp"

namespace casimir::cli {

inline constexpr const char* csv_schema = "casimir-sweep/1";

/// One evaluation point of a run.
struct Point {
  double temperature = 0.0;
  double separation = 0.0;  // R
  std::optional<WallConfiguration> wall;

  ThermalBath bath() const { return ThermalBath(temperature); }
  double image_separation() const { return wall ? wall->image_vector().norm() : 0.0; }
};

/// Temperatures outer, geometry inner; this is also the row order of every output.
inline std::vector<Point> sweep_points(const RunConfig& cfg) {
  std::vector<double> temps;
  if (cfg.temperature_sweep) temps = cfg.temperature_sweep->values();
  else temps.push_back(*cfg.temperature);
  std::vector<double> geo = cfg.sweep ? cfg.sweep->values() : std::vector<double>{0.0};

  std::vector<Point> out;
  for (double t : temps) {
    for (double g : geo) {
      Point p;
      p.temperature = t;
      if (!cfg.wall) {
        p.separation = cfg.sweep ? g : cfg.separation;
      } else {
        Vec3 a = cfg.position_a, b = cfg.position_b;
        if (cfg.sweep && cfg.sweep_variable == SweepVariable::scale) {
          a *= g;
          b *= g;
        } else if (cfg.sweep && cfg.sweep_variable == SweepVariable::lift) {
          a.z() += g;
          b.z() += g;
        }
        p.wall.emplace(a, b);
        p.separation = p.wall->direct_vector().norm();
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

inline PotentialResult oracle_result(const RunConfig& cfg, const Point& p) {
  PotentialResult out;
  out.method = Method::matsubara_oracle;
  const ThermalBath bath = p.bath();
  if (p.wall) {
    const WallOracleReport rep = imaginary_axis_oracle(cfg.a(), cfg.b(), *p.wall, bath, cfg.quad);
    out.terms = TermBreakdown{rep.direct.value, rep.image.value, rep.cross.value,
                              rep.direct.error, rep.image.error, rep.cross.error};
    out.energy = out.terms->total();
    out.error_estimate = rep.error();
    out.regime = classify_regime(*p.wall, bath, cfg.a(), cfg.b(), cfg.regime_margin);
  } else {
    const OracleReport rep = imaginary_axis_oracle(cfg.a(), cfg.b(), p.separation, bath, cfg.quad);
    out.energy = rep.value;
    out.error_estimate = rep.error;
    out.regime = classify_regime(p.separation, bath, cfg.a(), cfg.b(), cfg.regime_margin);
  }
  return out;
}

/// Evaluates one point with one specific method. Throws DomainError if the method does
/// not exist for the geometry (e.g. near-zone next to a wall).
inline PotentialResult evaluate_method(const RunConfig& cfg, const Point& p, Method m) {
  const AtomModel& a = cfg.a();
  const AtomModel& b = cfg.b();
  const ThermalBath bath = p.bath();
  PotentialResult out;
  if (p.wall) {
    const WallConfiguration& w = *p.wall;
    switch (m) {
      case Method::full_integral: out = wall_full(a, b, w, bath, cfg.quad); break;
      case Method::matsubara_oracle: out = oracle_result(cfg, p); break;
      case Method::far_zone_qr: out = wall_far_zone(a, b, w, bath); break;
      case Method::limit_high_t: out = limit_high_T(a, b, w, bath); break;
      case Method::limit_zero_t: out = limit_zero_T_wall(a, b, w); break;
      case Method::limit_mixed: out = limit_mixed(a, b, w, bath); break;
      case Method::near_zone:
      case Method::zero_t_far:
        throw DomainError(std::string(to_string(m)) + " has no wall form");
    }
    out.regime = classify_regime(w, bath, a, b, cfg.regime_margin);
  } else {
    const double r = p.separation;
    switch (m) {
      case Method::full_integral: out = free_space_full(a, b, r, bath, cfg.quad); break;
      case Method::matsubara_oracle: out = oracle_result(cfg, p); break;
      case Method::near_zone: out = free_space_near_zone(a, b, r, bath, cfg.quad); break;
      case Method::far_zone_qr: out = free_space_far_zone(a, b, r, bath); break;
      case Method::zero_t_far: out = zero_T_far_zone(a, b, r); break;
      case Method::limit_high_t: out = free_space_limit_high_T(a, b, r, bath); break;
      case Method::limit_zero_t: out = zero_T_far_zone(a, b, r); break;
      case Method::limit_mixed: throw DomainError("the mixed limit needs a wall");
    }
    out.regime = classify_regime(r, bath, a, b, cfg.regime_margin);
  }
  return out;
}

/// Method chosen by `run.method = auto`: the limiting formula of the classified regime,
/// the full integral in crossover regions.
inline Method automatic_method(const RunConfig& cfg, const Point& p) {
  const ThermalBath bath = p.bath();
  if (p.wall) {
    switch (classify_regime(*p.wall, bath, cfg.a(), cfg.b(), cfg.regime_margin)) {
      case RegimeLabel::far_low_t: return Method::limit_zero_t;
      case RegimeLabel::far_high_t: return Method::limit_high_t;
      case RegimeLabel::far_mixed: return Method::limit_mixed;
      case RegimeLabel::near_zone:
      case RegimeLabel::crossover: return Method::full_integral;
    }
  }
  switch (classify_regime(p.separation, bath, cfg.a(), cfg.b(), cfg.regime_margin)) {
    case RegimeLabel::near_zone: return Method::near_zone;
    case RegimeLabel::far_low_t:
    case RegimeLabel::far_high_t: return bath.is_zero() ? Method::zero_t_far : Method::far_zone_qr;
    default: return Method::full_integral;
  }
}

/// Method chosen by `run.method = asymptotic`: near-zone or far-zone closed form
/// regardless of how well the regime inequalities hold.
inline Method asymptotic_method(const RunConfig& cfg, const Point& p) {
  if (p.wall) return p.temperature == 0.0 ? Method::limit_zero_t : Method::far_zone_qr;
  const double k_max = std::max(cfg.a().max_wavenumber(), cfg.b().max_wavenumber());
  if (p.separation * k_max < 1.0) return Method::near_zone;
  return p.temperature == 0.0 ? Method::zero_t_far : Method::far_zone_qr;
}

/// Every method whose defining inequalities hold at margin 1 at this point, full and
/// oracle always first.
inline std::vector<Method> applicable_methods(const RunConfig& cfg, const Point& p) {
  std::vector<Method> out{Method::full_integral, Method::matsubara_oracle};
  const ThermalBath bath = p.bath();
  const auto q = regime_inequalities(p.separation,
                                     p.wall ? std::optional<double>(p.image_separation()) : std::nullopt,
                                     bath, cfg.a(), cfg.b(), 1.0);
  if (!p.wall && q.near) out.push_back(Method::near_zone);
  if (q.far) {
    if (p.wall) {
      if (!bath.is_zero()) out.push_back(Method::far_zone_qr);
      if (q.direct_high && q.image_high) out.push_back(Method::limit_high_t);
      if (q.direct_low && q.image_low) out.push_back(Method::limit_zero_t);
      if (q.direct_low && q.image_high) out.push_back(Method::limit_mixed);
    } else if (bath.is_zero()) {
      out.push_back(Method::zero_t_far);
    } else {
      out.push_back(Method::far_zone_qr);
      if (q.direct_high) out.push_back(Method::limit_high_t);
      if (q.direct_low) out.push_back(Method::zero_t_far);
    }
  }
  return out;
}

/// Outcome of one (point, method) evaluation.
struct Row {
  std::size_t point = 0;
  Method attempted = Method::full_integral;
  std::optional<PotentialResult> result;
  std::string failure;
};

inline Row evaluate_row(const RunConfig& cfg, const std::vector<Point>& points, std::size_t i,
                        Method m, bool fallback) {
  Row row;
  row.point = i;
  row.attempted = m;
  try {
    row.result = evaluate_method(cfg, points[i], m);
  } catch (const ConvergenceError& e) {
    if (!fallback || m != Method::full_integral) {
      row.failure = e.what();
      return row;
    }
    // Far from the atoms the real-axis integrand cancels to many digits against the
    // damped resonances; the imaginary-axis representation does not.
    try {
      row.result = oracle_result(cfg, points[i]);
      row.result->warnings.push_back(std::string("real-axis quadrature ill-conditioned (") +
                                     e.what() + "); imaginary-axis evaluation used");
    } catch (const Error& e2) {
      row.failure = e2.what();
    }
  } catch (const Error& e) {
    row.failure = e.what();
  }
  return row;
}

/// Runs `work(i)` for i < n on `jobs` threads. `work` must not throw.
template <class Work>
void parallel_for(std::size_t n, unsigned jobs, const Work& work) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) work(i);
    });
  for (auto& t : pool) t.join();
}

// --- CSV ------------------------------------------------------------------------------

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string units_description(const UnitSystem& u) {
  if (u.mode() == UnitMode::natural)
    return "natural (hbar = c = k_B = 1): length L0, energy hbar*c/L0, temperature hbar*c/(k_B*L0)";
  return "cgs: length cm, energy erg, temperature K (natural length unit " + fmt(u.length_unit_cm()) +
         " cm)";
}

inline void write_preamble(std::ostream& out, const RunConfig& cfg, const char* schema) {
  out << "# schema: " << schema << "\n";
  out << "# units: " << units_description(cfg.units) << "\n";
  out << "# geometry: " << (cfg.wall ? "wall (perfect conductor at z = 0)" : "free space") << "\n";
  out << "# method: " << to_string(cfg.method) << ", regime margin " << fmt(cfg.regime_margin)
      << ", quad.tol " << fmt(cfg.quad.tolerance) << "\n";
  if (cfg.timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# generated: " << buf << "\n";
  }
}

inline void write_csv_header(std::ostream& out, const RunConfig& cfg) {
  write_preamble(out, cfg, csv_schema);
  if (cfg.wall)
    out << "R,Rbar,T,lambda_T,regime,W_total,W_direct,W_image,W_cross,method,error_estimate\n";
  else
    out << "R,T,lambda_T,regime,W_total,W_direct,method,error_estimate\n";
}

inline std::string point_prefix(const RunConfig& cfg, const Point& p) {
  const UnitSystem& u = cfg.units;
  const double lambda = p.temperature > 0.0 ? thermal_length(p.bath())
                                            : std::numeric_limits<double>::infinity();
  std::string s = fmt(u.length_out(p.separation)) + ",";
  if (p.wall) s += fmt(u.length_out(p.image_separation())) + ",";
  s += fmt(u.temperature_out(p.temperature)) + "," + fmt(u.length_out(lambda)) + ",";
  return s;
}

inline void write_csv_row(std::ostream& out, const RunConfig& cfg, const Point& p, const Row& row) {
  const UnitSystem& u = cfg.units;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out << point_prefix(cfg, p);
  if (!row.result) {
    const RegimeLabel reg = p.wall ? classify_regime(*p.wall, p.bath(), cfg.a(), cfg.b(), cfg.regime_margin)
                                   : classify_regime(p.separation, p.bath(), cfg.a(), cfg.b(), cfg.regime_margin);
    out << to_string(reg) << "," << fmt(nan) << "," << fmt(nan) << ",";
    if (p.wall) out << fmt(nan) << "," << fmt(nan) << ",";
    out << "failed:" << to_string(row.attempted) << "," << fmt(nan) << "\n";
    return;
  }
  const PotentialResult& r = *row.result;
  out << to_string(r.regime) << ",";
  if (p.wall) {
    const TermBreakdown t = r.terms.value_or(TermBreakdown{r.energy, 0.0, 0.0});
    const double d = u.energy_out(t.direct), i = u.energy_out(t.image), c = u.energy_out(t.cross);
    out << fmt(d + i + c) << "," << fmt(d) << "," << fmt(i) << "," << fmt(c) << ",";
  } else {
    out << fmt(u.energy_out(r.energy)) << "," << fmt(u.energy_out(r.energy)) << ",";
  }
  out << to_string(r.method) << "," << fmt(u.energy_out(r.error_estimate)) << "\n";
}

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_selftest = 4 };

/// Evaluates every point (and every applicable method when run.method = all) on `jobs`
/// threads and writes the table in point order. Failed evaluations are written as rows
/// with NaN values and a `failed:<method>` method; the return value is then 3.
inline int run_sweep(const RunConfig& cfg, unsigned jobs, std::ostream& out, std::ostream& log) {
  const std::vector<Point> points = sweep_points(cfg);
  std::vector<std::pair<std::size_t, Method>> tasks;
  for (std::size_t i = 0; i < points.size(); ++i) {
    switch (cfg.method) {
      case MethodChoice::automatic: tasks.emplace_back(i, automatic_method(cfg, points[i])); break;
      case MethodChoice::full: tasks.emplace_back(i, Method::full_integral); break;
      case MethodChoice::asymptotic: tasks.emplace_back(i, asymptotic_method(cfg, points[i])); break;
      case MethodChoice::all:
        for (Method m : applicable_methods(cfg, points[i])) tasks.emplace_back(i, m);
        break;
    }
  }
  std::vector<Row> rows(tasks.size());
  const bool fallback = cfg.method == MethodChoice::automatic;
  parallel_for(tasks.size(), jobs, [&](std::size_t k) {
    rows[k] = evaluate_row(cfg, points, tasks[k].first, tasks[k].second, fallback);
  });

  write_csv_header(out, cfg);
  int status = exit_ok;
  for (const Row& row : rows) {
    write_csv_row(out, cfg, points[row.point], row);
    if (!row.result) {
      status = exit_numerical;
      log << "point " << row.point << " (" << to_string(row.attempted) << "): " << row.failure << "\n";
    } else {
      for (const auto& w : row.result->warnings)
        log << "warning: point " << row.point << ": " << w << "\n";
    }
  }
  out.flush();
  return status;
}

}  // namespace casimir::cli

#endif  // CASIMIR_CLI_SWEEP_HPP
