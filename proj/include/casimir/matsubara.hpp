#ifndef CASIMIR_MATSUBARA_HPP
#define CASIMIR_MATSUBARA_HPP

#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "casimir/atoms.hpp"
#include "casimir/errors.hpp"
#include "casimir/geometry.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/radial_operators.hpp"
#include "casimir/tensors.hpp"

// Imaginary-frequency (Matsubara) oracles. The real-axis spectral integral
// (1/pi) Im int_0^inf g(k) coth(k/2T) dk is closed in the upper half plane, where
// coth(k/2T) has poles at k = i xi_n, xi_n = 2 pi n T, which gives
//   W = 2T sum'_{n>=0} g(i xi_n)      (n = 0 term halved).
// Nothing here shares code with the real-axis quadrature.

namespace casimir {

/// Free-space radial kernel on the imaginary axis:
///   W = -(2T/R^3) sum'_n alpha_A alpha_B e^{-2 xi R} sum_j c_j xi^j R^{j-3}.
struct MatsubaraKernel {
  std::array<double, 5> coefficients{};
  double fit_residual = 0.0;           // max relative misfit of the locked kernel
  double max_integer_deviation = 0.0;  // max |c_fit - round(c_fit)|

  /// e^{-2 xi R} sum_j c_j xi^j R^{j-3}
  double evaluate(double xi, double r) const {
    double poly = 0.0;
    double p = 1.0 / (r * r * r);
    for (int j = 0; j < 5; ++j) {
      poly += coefficients[j] * p;
      p *= xi * r;
    }
    return std::exp(-2.0 * xi * r) * poly;
  }
};

namespace detail {

// Columns M_j(R) = -(2T/R^3) sum'_n e^{-2 xi_n R} xi_n^j R^{j-3} at T = 1.
inline std::array<double, 5> kernel_columns(double r, double temperature) {
  std::array<double, 5> col{};
  const double step = 2.0 * std::numbers::pi * temperature;
  for (long n = 0;; ++n) {
    const double xi = step * static_cast<double>(n);
    const double y = 2.0 * xi * r;
    if (y > 80.0) break;
    const double w = (n == 0 ? 0.5 : 1.0) * std::exp(-y);
    double p = 1.0 / (r * r * r);
    for (int j = 0; j < 5; ++j) {
      col[j] += w * p;
      p *= xi * r;
    }
  }
  for (auto& c : col) c *= -2.0 * temperature / (r * r * r);
  return col;
}

inline double kernel_target(double r, double temperature) {
  const double lambda = 1.0 / (2.0 * std::numbers::pi * temperature);
  return temperature * apply_QR(coth_jet(r, lambda), r);
}

}  // namespace detail

/// Fits the five kernel coefficients by least squares against the far-zone radial
/// formula T Q^R coth(R/lambda_T) (static unit polarizabilities) over three decades of
/// R/lambda_T, requires every coefficient to sit within `integer_tolerance` of an
/// integer, and locks the rounded values. Throws OracleGateError otherwise.
inline MatsubaraKernel derive_matsubara_kernel(double integer_tolerance = 1e-6) {
  constexpr int samples = 25;
  const double temperature = 1.0;
  const double lambda = 1.0 / (2.0 * std::numbers::pi * temperature);
  Eigen::MatrixXd a(samples, 5);
  Eigen::VectorXd b(samples);
  std::vector<double> radii(samples);
  for (int i = 0; i < samples; ++i) {
    const double rho = std::pow(10.0, -1.5 + 3.0 * i / (samples - 1));
    radii[i] = rho * lambda;
    const double target = detail::kernel_target(radii[i], temperature);
    const auto col = detail::kernel_columns(radii[i], temperature);
    for (int j = 0; j < 5; ++j) a(i, j) = col[j] / std::abs(target);
    b(i) = target / std::abs(target);
  }
  const Eigen::VectorXd fit = a.colPivHouseholderQr().solve(b);

  MatsubaraKernel k;
  for (int j = 0; j < 5; ++j) {
    k.coefficients[j] = std::round(fit(j));
    k.max_integer_deviation = std::max(k.max_integer_deviation, std::abs(fit(j) - k.coefficients[j]));
  }
  for (int i = 0; i < samples; ++i) {
    const auto col = detail::kernel_columns(radii[i], temperature);
    double model = 0.0;
    for (int j = 0; j < 5; ++j) model += k.coefficients[j] * col[j];
    const double target = detail::kernel_target(radii[i], temperature);
    k.fit_residual = std::max(k.fit_residual, std::abs(model - target) / std::abs(target));
  }
  if (!(k.max_integer_deviation <= integer_tolerance) || !(k.fit_residual <= 1e-9)) {
    std::ostringstream os;
    os.precision(12);
    os << "Matsubara kernel bootstrap failed: fit = [";
    for (int j = 0; j < 5; ++j) os << (j ? ", " : "") << fit(j);
    os << "], max integer deviation " << k.max_integer_deviation << ", residual "
       << k.fit_residual;
    throw OracleGateError(os.str());
  }
  return k;
}

/// The locked kernel; derived (and gated) once per process.
inline const MatsubaraKernel& matsubara_kernel() {
  static const MatsubaraKernel k = derive_matsubara_kernel();
  return k;
}

namespace detail {

// 2T sum'_n term(xi_n). `decay` is the length L of the e^{-2 xi L} envelope, used to
// decide when the polynomial prefactor (degree <= 4) is past its peak.
template <class Term>
OracleReport matsubara_sum(const ThermalBath& bath, double decay, const Term& term,
                           const QuadratureOptions& opts) {
  if (bath.is_zero())
    throw DomainError("Matsubara sum needs T > 0; use the imaginary-frequency integral at T = 0");
  const double t = bath.temperature();
  const double step = 2.0 * std::numbers::pi * t;
  double sum = 0.0, abs_sum = 0.0, last = 0.0, prev = 0.0;
  std::size_t n = 0;
  int quiet = 0;
  for (;; ++n) {
    if (n >= opts.matsubara_terms)
      throw ConvergenceError("Matsubara sum exceeded its term budget (" +
                             std::to_string(opts.matsubara_terms) + ")");
    const double xi = step * static_cast<double>(n);
    const double v = (n == 0 ? 0.5 : 1.0) * term(xi);
    sum += v;
    abs_sum += std::abs(v);
    prev = last;
    last = v;
    const bool past_peak = 2.0 * xi * decay > 10.0;
    if (past_peak && std::abs(v) <= 1e-18 * abs_sum) {
      if (++quiet >= 3 || v == 0.0) break;
    } else {
      quiet = 0;
    }
  }
  // Tail past the last term: geometric with the last observed ratio.
  double tail = 0.0;
  if (last != 0.0) {
    const double q = std::min(std::abs(last / prev), 0.999);
    tail = std::abs(last) * q / (1.0 - q);
  }
  OracleReport rep;
  rep.value = 2.0 * t * sum;
  rep.error = 2.0 * t * (tail + 8.0 * std::numeric_limits<double>::epsilon() * abs_sum *
                                    std::sqrt(static_cast<double>(n + 1)));
  rep.terms = n + 1;
  return rep;
}

inline double alpha_product(const AtomModel& a, const AtomModel& b, double xi) {
  return imaginary_axis_polarizability(a, xi) * imaginary_axis_polarizability(b, xi);
}

// tr(sigma A(i xi, R) A(i xi, Rbar))
inline double cross_kernel_imaginary(double xi, const Vec3& direct, const Vec3& image) {
  return (reflection_matrix() * green_tensor_imaginary(xi, direct) *
          green_tensor_imaginary(xi, image))
      .trace();
}

}  // namespace detail

/// Free-space potential from the Matsubara sum with the locked kernel.
inline OracleReport matsubara_free_space(const AtomModel& a, const AtomModel& b, double r,
                                         const ThermalBath& bath,
                                         const QuadratureOptions& opts = {}) {
  if (!(r > 0.0)) throw DomainError("separation must be > 0");
  const MatsubaraKernel& k = matsubara_kernel();
  return detail::matsubara_sum(
      bath, r,
      [&](double xi) { return -detail::alpha_product(a, b, xi) * k.evaluate(xi, r) / (r * r * r); },
      opts);
}

/// Matsubara evaluation of the wall potential, term by term.
struct WallOracleReport {
  OracleReport direct;
  OracleReport image;
  OracleReport cross;
  double value() const { return direct.value + image.value + cross.value; }
  double error() const { return direct.error + image.error + cross.error; }
};

inline WallOracleReport matsubara_wall(const AtomModel& a, const AtomModel& b,
                                       const WallConfiguration& cfg, const ThermalBath& bath,
                                       const QuadratureOptions& opts = {}) {
  const Vec3 d = cfg.direct_vector(), e = cfg.image_vector();
  const double r = d.norm(), rb = e.norm();
  WallOracleReport out;
  out.direct = matsubara_free_space(a, b, r, bath, opts);
  out.image = matsubara_free_space(a, b, rb, bath, opts);
  out.cross = detail::matsubara_sum(
      bath, 0.5 * (r + rb),
      [&](double xi) { return detail::alpha_product(a, b, xi) * detail::cross_kernel_imaginary(xi, d, e); },
      opts);
  return out;
}

namespace detail {

// (1/pi) int_0^inf f(xi) d xi over geometric panels; f decays at least like e^{-xi L}
// beyond the atomic scales.
template <class F>
OracleReport imaginary_frequency_integral(const F& f, double length, double k_min, double k_max,
                                          const QuadratureOptions& opts) {
  const double start = 1e-3 * std::min(k_min, 1.0 / length);
  const double tol = std::min(opts.tolerance, 1e-10);
  double total = 0.0, abs_total = 0.0, err = 0.0;
  double lo = 0.0, hi = start;
  std::size_t panels = 0;
  for (;;) {
    double e = 0.0, l1 = 0.0;
    const double v = adaptive_gauss_kronrod<31>(f, lo, hi, 15, tol, &e, &l1);
    total += v;
    abs_total += l1;
    err += e;
    ++panels;
    if (hi * length > 40.0 && hi > 100.0 * k_max && std::abs(v) <= 1e-17 * abs_total) break;
    if (panels > 400) throw ConvergenceError("imaginary-frequency integral did not decay");
    lo = hi;
    hi *= 2.0;
  }
  OracleReport rep;
  rep.value = total / std::numbers::pi;
  rep.error = (err + 16.0 * std::numeric_limits<double>::epsilon() * abs_total) / std::numbers::pi;
  rep.terms = panels;
  return rep;
}

inline double atom_scale_min(const AtomModel& a, const AtomModel& b) {
  return std::min(a.min_wavenumber(), b.min_wavenumber());
}
inline double atom_scale_max(const AtomModel& a, const AtomModel& b) {
  return std::max(a.max_wavenumber(), b.max_wavenumber());
}

}  // namespace detail

/// T = 0 free-space potential, (1/pi) int_0^inf alpha_A alpha_B K(i xi) d xi.
inline OracleReport imaginary_frequency_free_space(const AtomModel& a, const AtomModel& b, double r,
                                                   const QuadratureOptions& opts = {}) {
  if (!(r > 0.0)) throw DomainError("separation must be > 0");
  const MatsubaraKernel& k = matsubara_kernel();
  return detail::imaginary_frequency_integral(
      [&](double xi) { return -detail::alpha_product(a, b, xi) * k.evaluate(xi, r) / (r * r * r); },
      r, detail::atom_scale_min(a, b), detail::atom_scale_max(a, b), opts);
}

inline WallOracleReport imaginary_frequency_wall(const AtomModel& a, const AtomModel& b,
                                                 const WallConfiguration& cfg,
                                                 const QuadratureOptions& opts = {}) {
  const Vec3 d = cfg.direct_vector(), e = cfg.image_vector();
  WallOracleReport out;
  out.direct = imaginary_frequency_free_space(a, b, d.norm(), opts);
  out.image = imaginary_frequency_free_space(a, b, e.norm(), opts);
  out.cross = detail::imaginary_frequency_integral(
      [&](double xi) { return detail::alpha_product(a, b, xi) * detail::cross_kernel_imaginary(xi, d, e); },
      0.5 * (d.norm() + e.norm()), detail::atom_scale_min(a, b), detail::atom_scale_max(a, b), opts);
  return out;
}

/// Either oracle, chosen by temperature.
inline OracleReport imaginary_axis_oracle(const AtomModel& a, const AtomModel& b, double r,
                                          const ThermalBath& bath, const QuadratureOptions& opts = {}) {
  return bath.is_zero() ? imaginary_frequency_free_space(a, b, r, opts)
                        : matsubara_free_space(a, b, r, bath, opts);
}

inline WallOracleReport imaginary_axis_oracle(const AtomModel& a, const AtomModel& b,
                                              const WallConfiguration& cfg, const ThermalBath& bath,
                                              const QuadratureOptions& opts = {}) {
  return bath.is_zero() ? imaginary_frequency_wall(a, b, cfg, opts)
                        : matsubara_wall(a, b, cfg, bath, opts);
}

/// London coefficient C6 = (2/3) sum_pq |mu_A,p|^2 |mu_B,q|^2 / (k_p + k_q), so that the
/// undamped T = 0 near-zone potential is -C6 / R^6.
inline double london_c6(const AtomModel& a, const AtomModel& b) {
  double sum = 0.0;
  for (const auto& p : a.transitions())
    for (const auto& q : b.transitions())
      sum += p.dipole_squared * q.dipole_squared / (p.wavenumber + q.wavenumber);
  return 2.0 / 3.0 * sum;
}

}  // namespace casimir

#endif  // CASIMIR_MATSUBARA_HPP
