#ifndef CASIMIR_QUADRATURE_HPP
#define CASIMIR_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <mutex>
#include <numbers>
#include <span>
#include <type_traits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "casimir/errors.hpp"

namespace casimir {

/// Knobs of the regulated oscillatory integration and of the Matsubara oracle.
///
/// Regulators form a geometric ladder eta_j = eta_start * L * eta_ratio^j, j < eta_count,
/// where L is the oscillation length of the integrand (phase e^{2ikL}). The
/// extrapolation to eta = 0 uses polynomials of degree 2..`extrapolation_order` through
/// contiguous windows of the ladder; the (degree, window) pair with the smallest error
/// estimate wins.
/// Before extrapolating, the regulated tail is multiplied by (eta - 2iL)^pole_order,
/// which removes the pole that polynomially growing amplitudes (up to k^(pole_order-1))
/// place at eta = 2iL, the nearest singularity of the regulated integral.
struct QuadratureOptions {
  double tolerance = 1e-8;
  double eta_start = 0.5;
  double eta_ratio = 0.75;
  int eta_count = 16;
  int extrapolation_order = 7;
  int pole_order = 5;
  std::size_t panel_budget = 400000;
  std::size_t matsubara_terms = 5000000;
  unsigned head_depth = 18;
  // Magnitude against which convergence is judged when the integral is one term of a
  // larger sum; 0 judges the integral against itself. The error estimate is unaffected.
  double reference_scale = 0.0;

  void validate() const {
    if (!(tolerance > 0.0)) throw DomainError("quadrature tolerance must be > 0");
    if (!(eta_start > 0.0)) throw DomainError("eta_start must be > 0");
    if (!(eta_ratio > 0.0 && eta_ratio < 1.0))
      throw DomainError("eta ladder must decrease strictly toward 0 (0 < ratio < 1)");
    if (extrapolation_order < 1 || eta_count < extrapolation_order + 1)
      throw DomainError("eta ladder shorter than extrapolation window");
    if (pole_order < 0) throw DomainError("pole_order must be >= 0");
    if (panel_budget == 0 || matsubara_terms == 0) throw DomainError("zero evaluation budget");
    if (!(reference_scale >= 0.0)) throw DomainError("reference_scale must be >= 0");
  }
};

/// A localized sharp feature of the integrand (e.g. a damped resonance at `center` of
/// half-width `width`); the integrator places breakpoints around it.
struct Feature {
  double center;
  double width;
};

struct IntegralEstimate {
  std::complex<double> value;
  double error = 0.0;
  bool converged = false;
  std::size_t panels = 0;
  std::size_t evaluations = 0;
  // Last two extrapolants of the winning window (diagnostic).
  std::complex<double> extrapolant = 0.0;
  std::complex<double> previous_extrapolant = 0.0;
};

/// Result of an independent oracle evaluation compared against a primary path.
struct OracleReport {
  double value = 0.0;
  double error = 0.0;
  std::size_t terms = 0;
  bool agrees = false;
  double primary_value = 0.0;
  double primary_error = 0.0;

  /// Fills the primary fields and the agreement flag: |delta| <= combined estimates.
  OracleReport& compare_with(double primary, double primary_err) {
    primary_value = primary;
    primary_error = primary_err;
    agrees = std::abs(primary - value) <= error + primary_err;
    return *this;
  }
};

/// Which part of the complex integral the caller needs. With `imaginary`, the head
/// integrates Im f only (the real part may be non-integrable at k = 0, e.g. a 1/k thermal
/// factor times a kernel that is real and finite at k = 0) and the error estimate covers
/// the imaginary part only. The tail always uses the full complex integrand, which is what
/// makes the regulated tail analytic in eta.
enum class Component { full, imaginary };

namespace detail {

struct Node {
  double k;
  double weight_kronrod;
  double weight_gauss;  // 0 on Kronrod-only nodes
};

// 15-point Kronrod rule on [a, b] with its embedded 7-point Gauss rule.
inline void append_kronrod_nodes(double a, double b, std::vector<Node>& out) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < x.size(); ++i) {
    // Even-indexed Kronrod abscissae (starting at the centre) are the Gauss nodes.
    const double w_g = (i % 2 == 0) ? wg[i / 2] : 0.0;
    out.push_back({mid + half * x[i], half * wk[i], half * w_g});
    if (i != 0) out.push_back({mid - half * x[i], half * wk[i], half * w_g});
  }
}

template <int N, class F, class R = std::invoke_result_t<const F&, double>>
R adaptive_gk_step(const F& f, double a, double b, unsigned depth, double abs_tol,
                   double rel_tol, double& error, double& l1) {
  using GK = boost::math::quadrature::gauss_kronrod<double, N>;
  double e = 0.0, l = 0.0;
  R v = GK::integrate(f, a, b, 0, rel_tol, &e, &l);
  // The non-adaptive rule reports its error on [-1, 1]; rescale to [a, b].
  e *= 0.5 * (b - a);
  if (abs_tol == 0.0) abs_tol = rel_tol * std::abs(v);
  const double tol = std::max(abs_tol, rel_tol * std::abs(v));
  if (depth > 0 && e > tol && e > 4.0 * std::numeric_limits<double>::epsilon() * l) {
    const double mid = 0.5 * (a + b);
    double e1 = 0.0, l1a = 0.0, e2 = 0.0, l1b = 0.0;
    v = adaptive_gk_step<N>(f, a, mid, depth - 1, 0.5 * abs_tol, rel_tol, e1, l1a);
    v += adaptive_gk_step<N>(f, mid, b, depth - 1, 0.5 * abs_tol, rel_tol, e2, l1b);
    e = e1 + e2;
    l = l1a + l1b;
  }
  error = e;
  l1 = l;
  return v;
}

/// Recursive bisection Gauss-Kronrod on [a, b] to relative tolerance `rel_tol` of the
/// whole-interval estimate. Returns the integral; `error` and `l1` receive the summed
/// Kronrod-Gauss error and the integral of |f|.
template <int N, class F>
auto adaptive_gauss_kronrod(const F& f, double a, double b, unsigned max_depth, double rel_tol,
                            double* error = nullptr, double* l1 = nullptr) {
  double e = 0.0, l = 0.0;
  auto v = adaptive_gk_step<N>(f, a, b, max_depth, 0.0, rel_tol, e, l);
  if (error) *error = e;
  if (l1) *l1 = l;
  return v;
}

/// Polynomial through (x_j, y_j) evaluated at 0 (Neville), plus the Lebesgue sum
/// sum_j |l_j(0)|.
inline std::complex<double> extrapolate_to_zero(std::span<const double> x,
                                                std::span<const std::complex<double>> y,
                                                double* lebesgue = nullptr) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> p(y.begin(), y.end());
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
  if (lebesgue) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double l = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) l *= x[i] / (x[i] - x[j]);
      sum += std::abs(l);
    }
    *lebesgue = sum;
  }
  return p[0];
}

template <class F>
IntegralEstimate regulated_integral(F&& f, double length, std::span<const Feature> features,
                                    const QuadratureOptions& opts,
                                    Component part = Component::full) {
  using cplx = std::complex<double>;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  opts.validate();
  if (!(length > 0.0)) throw DomainError("oscillation length must be positive");

  const bool im_only = part == Component::imaginary;
  auto project = [im_only](cplx c) { return im_only ? cplx(0.0, c.imag()) : c; };

  IntegralEstimate result;
  const double half_period = std::numbers::pi / (2.0 * length);

  // Unregulated head [0, K] covers every feature; the tail is smooth.
  double head_end = 4.0 * half_period;
  for (const auto& ft : features)
    head_end = std::max(head_end, 1.5 * ft.center + 300.0 * ft.width);
  head_end = half_period * std::ceil(head_end / half_period);

  std::vector<double> cuts;
  for (double k = 0.0; k <= head_end * (1.0 + 1e-14); k += half_period) cuts.push_back(k);
  for (const auto& ft : features) {
    for (double m : {0.0, 1.0, 4.0, 16.0, 64.0, 256.0}) {
      for (double sgn : {-1.0, 1.0}) {
        const double c = ft.center + sgn * m * ft.width;
        if (c > 0.0 && c < head_end) cuts.push_back(c);
      }
    }
    if (0.5 * ft.center < head_end) cuts.push_back(0.5 * ft.center);
  }
  std::ranges::sort(cuts);
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return b - a <= 1e-13 * head_end; }),
             cuts.end());
  cuts.back() = head_end;

  cplx head = 0.0;
  double head_error = 0.0;
  double head_abs = 0.0;
  std::size_t evals = 0;
  auto counted = [&](double k) {
    ++evals;
    return cplx(f(k));
  };
  auto head_integrand = [&](double k) { return project(counted(k)); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0, l1 = 0.0;
    head += adaptive_gauss_kronrod<15>(head_integrand, cuts[i], cuts[i + 1], opts.head_depth,
                                       0.05 * opts.tolerance, &err, &l1);
    head_error += err;
    head_abs += l1;
  }
  head_error += 4.0 * eps * head_abs;

  // Tail nodes, shared by every regulator.
  const int n_eta = opts.eta_count;
  std::vector<double> etas(n_eta);
  for (int j = 0; j < n_eta; ++j)
    etas[j] = opts.eta_start * length * std::pow(opts.eta_ratio, j);
  const double eta_min = etas.back();

  std::vector<cplx> sum_k(n_eta, 0.0);
  std::vector<double> sum_abs(n_eta, 0.0), quad_err(n_eta, 0.0);
  std::vector<Node> nodes;
  nodes.reserve(15);
  std::vector<cplx> values(15);
  double peak = 0.0;
  double previous = 0.0;
  std::size_t panels = 0;
  double a = head_end;
  for (;;) {
    if (++panels > opts.panel_budget)
      throw ConvergenceError("oscillatory_integral: tail panel budget exhausted");
    const double width = std::min(half_period, std::max(0.25 * a, half_period / 64.0));
    const double b = a + width;
    nodes.clear();
    append_kronrod_nodes(a, b, nodes);
    for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = counted(nodes[i].k);
    for (int j = 0; j < n_eta; ++j) {
      cplx pk = 0.0, pg = 0.0;
      double pa = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const cplx v = values[i] * std::exp(-etas[j] * (nodes[i].k - head_end));
        pk += nodes[i].weight_kronrod * v;
        pg += nodes[i].weight_gauss * v;
        pa += nodes[i].weight_kronrod * std::abs(v);
      }
      sum_k[j] += pk;
      sum_abs[j] += pa;
      // QUADPACK heuristic on the Kronrod-Gauss difference.
      const double diff = std::abs(pk - pg);
      quad_err[j] += (pa > 0.0) ? diff * std::min(1.0, std::pow(200.0 * diff / pa, 1.5)) : 0.0;
    }
    double contribution = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      contribution += nodes[i].weight_kronrod * std::abs(values[i]) *
                      std::exp(-eta_min * (nodes[i].k - head_end));
    peak = std::max(peak, contribution);
    const double decay = eta_min * (b - head_end);
    const bool decreasing = contribution <= previous;
    previous = contribution;
    a = b;
    if (decay > 745.0 || contribution == 0.0) break;
    if (decay > 5.0 && decreasing && contribution <= 1e-18 * peak) break;
  }

  // Extrapolate eta -> 0 over every window; keep the one with the smallest estimate.
  const cplx pole(0.0, 2.0 * length);
  std::vector<cplx> scaled(n_eta);
  std::vector<double> scaled_noise(n_eta);
  for (int j = 0; j < n_eta; ++j) {
    const cplx factor = std::pow(etas[j] - pole, opts.pole_order);
    scaled[j] = sum_k[j] * factor;
    scaled_noise[j] = (4.0 * eps * sum_abs[j] + quad_err[j]) * std::abs(factor);
  }
  const cplx unscale = std::pow(-pole, -opts.pole_order);
  double best_error = std::numeric_limits<double>::infinity();
  for (int degree = 2; degree <= opts.extrapolation_order; ++degree) {
    const int m = degree + 1;
    for (int s = 0; s + m <= n_eta; ++s) {
      std::span<const double> x(etas.data() + s, m);
      std::span<const cplx> y(scaled.data() + s, m);
      double lebesgue = 0.0;
      const cplx full = project(extrapolate_to_zero(x, y, &lebesgue) * unscale);
      const cplx drop_first = project(extrapolate_to_zero(x.subspan(1), y.subspan(1)) * unscale);
      const cplx drop_last = project(extrapolate_to_zero(x.first(m - 1), y.first(m - 1)) * unscale);
      double noise = 0.0;
      for (int j = s; j < s + m; ++j) noise = std::max(noise, scaled_noise[j]);
      const double err =
          2.0 * std::max(std::abs(full - drop_first), std::abs(full - drop_last)) +
          lebesgue * noise * std::abs(unscale);
      if (err < best_error) {
        best_error = err;
        result.value = head + full;
        result.extrapolant = full;
        result.previous_extrapolant = drop_first;
      }
    }
  }
  result.error = head_error + best_error;
  result.panels = panels + cuts.size() - 1;
  result.evaluations = evals;
  const double scale = std::max(std::abs(result.value), opts.reference_scale);
  result.converged = result.error <= opts.tolerance * scale;
  if (!(result.error <= std::sqrt(opts.tolerance) * scale) &&
      !(result.error <= 1e3 * eps * head_abs)) {
    std::ostringstream os;
    os.precision(12);
    os << "oscillatory_integral did not converge: last extrapolants " << result.extrapolant
       << " and " << result.previous_extrapolant << ", error estimate " << result.error;
    throw ConvergenceError(os.str());
  }
  return result;
}

}  // namespace detail

/// Checks the regulator extrapolation on integrals with known Abel sums,
///   int_0^inf sin(a k) dk = 1/a,   int_0^inf k cos(a k) dk = -1/a^2,
/// to 1e-8 relative. Returns the worst relative deviation; throws OracleGateError on
/// failure.
inline double regulator_self_test(const QuadratureOptions& opts = {}) {
  double worst = 0.0;
  for (double a : {1.0, 3.7, 0.25}) {
    auto plain = [a](double k) { return std::polar(1.0, a * k); };
    auto ramp = [a](double k) { return k * std::polar(1.0, a * k); };
    const auto s = detail::regulated_integral(plain, a / 2.0, {}, opts);
    const auto r = detail::regulated_integral(ramp, a / 2.0, {}, opts);
    worst = std::max(worst, std::abs(s.value.imag() - 1.0 / a) * a);
    worst = std::max(worst, std::abs(r.value.real() + 1.0 / (a * a)) * a * a);
  }
  if (!(worst <= 1e-8))
    throw OracleGateError("regulator extrapolation self-test failed: deviation " +
                          std::to_string(worst));
  return worst;
}

/// Abel-regularized integral int_0^inf f(k) dk of a complex integrand whose
/// oscillating part is e^{2ikL} (`length` = L) and whose amplitude may grow
/// polynomially.
///
/// The head [0, K] holding every feature is integrated adaptively without regulator;
/// the tail is integrated with e^{-eta (k - K)} on half-period panels for a ladder of
/// eta, and the ladder is extrapolated polynomially to eta = 0. Since the regulator
/// only acts beyond K, the limit is the Abel sum of the full integral.
///
/// The error estimate is the head quadrature error plus twice the spread of the last
/// extrapolants plus the rounding floor amplified by the extrapolation's Lebesgue sum.
/// Throws ConvergenceError with the last two extrapolants when the estimate exceeds
/// sqrt(tolerance) relative.
template <class F>
IntegralEstimate oscillatory_integral(F&& f, double length, std::span<const Feature> features,
                                      const QuadratureOptions& opts = {},
                                      Component part = Component::full) {
  static std::once_flag checked;
  std::call_once(checked, [] { regulator_self_test(); });
  return detail::regulated_integral(std::forward<F>(f), length, features, opts, part);
}

template <class F>
IntegralEstimate oscillatory_integral(F&& f, double length, const QuadratureOptions& opts = {}) {
  return oscillatory_integral(std::forward<F>(f), length, std::span<const Feature>{}, opts);
}

}  // namespace casimir

#endif  // CASIMIR_QUADRATURE_HPP
