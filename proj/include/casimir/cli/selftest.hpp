#ifndef CASIMIR_CLI_SELFTEST_HPP
#define CASIMIR_CLI_SELFTEST_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "casimir/finite_difference.hpp"
#include "casimir/matsubara.hpp"
#include "casimir/potentials.hpp"
#include "casimir/radial_operators.hpp"
#include "casimir/tensors.hpp"
#include "casimir/cli/sweep.hpp"

namespace casimir::cli {

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

namespace detail {

inline Check run_check(const std::string& name, const std::function<std::string()>& body) {
  try {
    return {name, true, body()};
  } catch (const std::exception& e) {
    return {name, false, e.what()};
  }
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace detail

/// Oracle gates plus a quick invariant smoke suite. Each check is independent.
inline std::vector<Check> self_test_checks() {
  using detail::require;
  using detail::sci;
  std::vector<Check> out;

  out.push_back(detail::run_check("regulator extrapolation (Abel sums)", [] {
    return "worst deviation " + sci(regulator_self_test());
  }));

  out.push_back(detail::run_check("Matsubara kernel bootstrap gate", [] {
    const MatsubaraKernel k = derive_matsubara_kernel();
    std::string c;
    for (double v : k.coefficients) c += (c.empty() ? "" : " ") + fmt(v);
    return "coefficients [" + c + "], integer deviation " + sci(k.max_integer_deviation);
  }));

  out.push_back(detail::run_check("Q^R identities (analytic and finite differences)", [] {
    double worst = 0.0;
    for (double r : {0.3, 1.0, 2.7}) {
      const double want_inv = -23.0 / (2.0 * std::pow(r, 7));
      const double want_c = -3.0 / std::pow(r, 6);
      worst = std::max(worst, std::abs(apply_QR(inverse_jet(r), r) / want_inv - 1.0));
      worst = std::max(worst, std::abs(apply_QR(constant_jet(1.0), r) / want_c - 1.0));
      worst = std::max(worst, std::abs(apply_QR([](long double x) { return 1.0L / x; }, r) / want_inv - 1.0));
      const double lam = 0.8 * r;
      const double fd = apply_QR([lam](long double x) { return 1.0L / std::tanh(x / lam); }, r);
      worst = std::max(worst, std::abs(apply_QR(coth_jet(r, lam), r) / fd - 1.0));
    }
    require(worst <= 1e-7, "deviation " + sci(worst));
    return "worst relative deviation " + sci(worst);
  }));

  out.push_back(detail::run_check("bracket identity V:tau", [] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0), lk(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const Vec3 r(u(rng), u(rng), u(rng));
      if (r.norm() < 0.05) continue;
      const double k = std::pow(10.0, lk(rng));
      const double x = k * r.norm();
      const double scale = (x * x + 2.0 + 5.0 / x + 6.0 / (x * x) + 3.0 / (x * x * x)) / std::pow(r.norm(), 3);
      worst = std::max(worst, std::abs(scalar_contraction_V_tau(k, r) -
                                       scalar_contraction_closed_form(k, r.norm())) / scale);
    }
    require(worst <= 1e-10, "deviation " + sci(worst));
    return "worst scaled deviation " + sci(worst);
  }));

  out.push_back(detail::run_check("real-axis quadrature vs Matsubara sum", [] {
    const AtomModel s = AtomModel::two_level(1.0, 1.0).as_static();
    const ThermalBath bath(1.0);
    const double lambda = thermal_length(bath);
    double worst = 0.0;
    for (double rho : {0.05, 1.0, 20.0}) {
      const double r = rho * lambda;
      const PotentialResult f = free_space_full(s, s, r, bath);
      OracleReport o = matsubara_free_space(s, s, r, bath);
      o.compare_with(f.energy, f.error_estimate);
      require(o.agrees, "disagree at R/lambda_T = " + fmt(rho));
      worst = std::max(worst, std::abs(f.energy / o.value - 1.0));
    }
    return "worst relative difference " + sci(worst);
  }));

  out.push_back(detail::run_check("wall decomposition and attractiveness", [] {
    const AtomModel s = AtomModel::two_level(1.0, 1.0).as_static();
    const ThermalBath bath(1.0);
    const WallConfiguration cfg(Vec3(0.0, 0.0, 0.2), Vec3(0.15, 0.0, 0.3));
    const PotentialResult w = wall_full(s, s, cfg, bath);
    require(std::abs(w.terms->total() - w.energy) <= 1e-12 * std::abs(w.energy), "total != sum of terms");
    const PotentialResult d = free_space_full(s, s, separations(cfg).direct, bath);
    require(w.terms->direct == d.energy, "direct term differs from free space");
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 10.0), v(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
      const WallConfiguration c(Vec3(v(rng), v(rng), u(rng)), Vec3(v(rng), v(rng), u(rng)));
      require(limit_high_T(s, s, c, bath).energy < 0.0, "high-T limit not attractive");
    }
    return "sum exact, direct term shared, 1000 random high-T configurations attractive";
  }));

  return out;
}

inline int self_test(std::ostream& out) {
  bool ok = true;
  for (const Check& c : self_test_checks()) {
    out << (c.passed ? "ok    " : "FAIL  ") << c.name << ": " << c.detail << "\n";
    ok = ok && c.passed;
  }
  out << (ok ? "selftest passed\n" : "selftest FAILED\n");
  return ok ? exit_ok : exit_selftest;
}

}  // namespace casimir::cli

#endif  // CASIMIR_CLI_SELFTEST_HPP
