#ifndef CASIMIR_TENSORS_HPP
#define CASIMIR_TENSORS_HPP

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

#include <Eigen/Dense>

#include "casimir/errors.hpp"
#include "casimir/geometry.hpp"

namespace casimir {

using CMat3 = Eigen::Matrix3cd;

enum class TensorKind { potential, correlation, static_dipole };

inline const char* to_string(TensorKind k) {
  switch (k) {
    case TensorKind::potential: return "V";
    case TensorKind::correlation: return "tau";
    case TensorKind::static_dipole: return "static";
  }
  return "?";
}

/// A 3x3 real dipole tensor together with the point it was evaluated at.
struct DipoleTensor {
  Mat3 value;
  TensorKind kind;
  double wavenumber;
  Vec3 separation;

  double trace() const { return value.trace(); }
  double operator()(int l, int m) const { return value(l, m); }
};

namespace detail {

inline Mat3 projector_transverse(const Vec3& u) { return Mat3::Identity() - u * u.transpose(); }
inline Mat3 projector_dipole(const Vec3& u) { return Mat3::Identity() - 3.0 * u * u.transpose(); }

inline double checked_norm(const Vec3& r) {
  const double n = r.norm();
  if (!(n > 0.0)) throw DomainError("dipole tensor at zero separation");
  return n;
}

// Power series are used below |x| = 0.5, where the closed forms cancel badly.
inline constexpr double series_threshold = 0.5;

/// sin x - x cos x
inline double sin_minus_xcos(double x) {
  if (std::abs(x) >= series_threshold) return std::sin(x) - x * std::cos(x);
  // sum_{n>=1} (-1)^{n+1} 2n x^{2n+1} / (2n+1)!
  double term = x;  // x^{2n+1}/(2n+1)! at n = 0
  double sum = 0.0;
  const double x2 = x * x;
  for (int n = 1; n <= 12; ++n) {
    term *= x2 / ((2.0 * n) * (2.0 * n + 1.0));
    sum += (n % 2 == 1 ? 1.0 : -1.0) * 2.0 * n * term;
  }
  return sum;
}

/// (x cos x - sin x) / x^3, the coefficient of (delta - 3 RR) in tau; -> -1/3 at x = 0.
inline double tau_dipole_part(double x) {
  if (std::abs(x) >= series_threshold) return (x * std::cos(x) - std::sin(x)) / (x * x * x);
  // sum_{n>=1} (-1)^n 2n x^{2n-2} / (2n+1)!
  double fact = 1.0;  // (2n+1)!
  double xp = 1.0;    // x^{2n-2}
  double sum = 0.0;
  for (int n = 1; n <= 12; ++n) {
    fact *= (2.0 * n) * (2.0 * n + 1.0);
    sum += (n % 2 == 1 ? -1.0 : 1.0) * 2.0 * n * xp / fact;
    xp *= x * x;
  }
  return sum;
}

inline double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace detail

/// Classical potential tensor between two dipoles oscillating at wavenumber k:
///   V = [(delta - 3RR)(cos kR + kR sin kR) - (delta - RR) (kR)^2 cos kR] / R^3.
inline DipoleTensor potential_tensor_V(double k, const Vec3& rvec) {
  if (k < 0.0) throw DomainError("potential_tensor_V requires k >= 0");
  const double r = detail::checked_norm(rvec);
  const Vec3 u = rvec / r;
  const double x = k * r;
  const double c = std::cos(x), s = std::sin(x);
  Mat3 v = (detail::projector_dipole(u) * (c + x * s) - detail::projector_transverse(u) * x * x * c) /
           (r * r * r);
  return {v, TensorKind::potential, k, rvec};
}

/// Equal-time field correlation tensor (angular average of the transverse projector
/// times e^{ik.R}):
///   tau = (delta - RR) sin kR / kR + (delta - 3RR)(cos kR/(kR)^2 - sin kR/(kR)^3).
/// The removable kR -> 0 singularity of the second bracket is evaluated by series.
inline DipoleTensor correlation_tensor_tau(double k, const Vec3& rvec) {
  if (!(k > 0.0))
    throw DomainError("correlation_tensor_tau requires k > 0; the kR -> 0 limit is (2/3) delta");
  const double r = detail::checked_norm(rvec);
  const Vec3 u = rvec / r;
  const double x = k * r;
  Mat3 t = detail::projector_transverse(u) * detail::sinc(x) +
           detail::projector_dipole(u) * detail::tau_dipole_part(x);
  return {t, TensorKind::correlation, k, rvec};
}

/// (nabla^2 delta_lm - nabla_l nabla_m)(1/R) = (delta - 3RR)/R^3 off the origin; the
/// k = 0 value of V. Traceless.
inline DipoleTensor static_tensor_T(const Vec3& rvec) {
  const double r = detail::checked_norm(rvec);
  const Vec3 u = rvec / r;
  return {detail::projector_dipole(u) / (r * r * r), TensorKind::static_dipole, 0.0, rvec};
}

/// sigma . t: the z row flips sign.
inline DipoleTensor reflected_tensor(const DipoleTensor& t) {
  DipoleTensor out = t;
  out.value = reflection_matrix() * t.value;
  return out;
}

/// Bracket of the free-space spectral integrand,
///   B(x) = x sin 2x + 2 cos 2x - 5 sin 2x / x - 6 cos 2x / x^2 + 3 sin 2x / x^3,
/// with B(x) = (22/15) x^2 + O(x^4) evaluated by series below |x| = 0.5.
inline double interaction_bracket(double x) {
  if (std::abs(x) >= detail::series_threshold) {
    const double s = std::sin(2.0 * x), c = std::cos(2.0 * x);
    return x * s + 2.0 * c - 5.0 * s / x - 6.0 * c / (x * x) + 3.0 * s / (x * x * x);
  }
  // Coefficient of x^{2m}: collect the five Taylor series term by term.
  auto fact = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  double sum = 0.0;
  double xp = x * x;
  for (int m = 1; m <= 14; ++m) {
    const double sg = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
    const double p = std::ldexp(1.0, 2 * m);     // 2^{2m}
    double coeff = -sg * (p / 2.0) / fact(2 * m - 1)  // x sin 2x
                   + 2.0 * sg * p / fact(2 * m)        // 2 cos 2x
                   - 5.0 * sg * 2.0 * p / fact(2 * m + 1)  // -5 sin 2x / x
                   + 6.0 * sg * 4.0 * p / fact(2 * m + 2)  // -6 cos 2x / x^2
                   - 3.0 * sg * 8.0 * p / fact(2 * m + 3);  // 3 sin 2x / x^3
    sum += coeff * xp;
    xp *= x * x;
  }
  return sum;
}

/// sum_lm V_lm tau_lm by explicit matrix contraction.
inline double scalar_contraction_V_tau(double k, const Vec3& rvec) {
  return potential_tensor_V(k, rvec).value.cwiseProduct(correlation_tensor_tau(k, rvec).value).sum();
}

/// Closed form of the same contraction: -B(kR)/R^3.
inline double scalar_contraction_closed_form(double k, double r) {
  return -interaction_bracket(k * r) / (r * r * r);
}

/// (3 sin^2 theta + 3 sin^2 theta_bar - 2) / (R^3 R_bar^3).
inline double cross_term_angular_closed_form(const Separations& s) {
  const double st = std::sin(s.theta), sb = std::sin(s.theta_image);
  return (3.0 * st * st + 3.0 * sb * sb - 2.0) / std::pow(s.direct * s.image, 3);
}

/// sigma_ln T_lm(R) T_nm(R_bar), T = (nabla^2 delta - nabla nabla)(1/R), by explicit
/// matrix contraction. The result equals the angular factor
/// (3 sin^2 theta + 3 sin^2 theta_bar - 2)/(R^3 R_bar^3) with sign +1, which is the
/// convention under which the high-temperature wall potential is
///   -a_A a_B T [3/R^6 + 3/R_bar^6 - (3 sin^2 theta + 3 sin^2 theta_bar - 2)/(R^3 R_bar^3)].
/// The closed form is checked on every call.
inline double cross_term_angular_contraction(const WallConfiguration& cfg) {
  const Mat3 t = static_tensor_T(cfg.direct_vector()).value;
  const Mat3 tb = static_tensor_T(cfg.image_vector()).value;
  const double contraction = (reflection_matrix() * t * tb.transpose()).trace();
  const Separations s = separations(cfg);
  const double closed = cross_term_angular_closed_form(s);
  const double scale = 4.0 / std::pow(s.direct * s.image, 3);
  if (std::abs(contraction - closed) > 1e-9 * scale)
    throw std::logic_error("cross-term contraction disagrees with its angular closed form");
  return contraction;
}

/// Retarded dyadic Green tensor (nabla^2 delta - nabla nabla) e^{ikR}/R
///   = [(delta - 3RR)(1 - ikR) - (delta - RR)(kR)^2] e^{ikR} / R^3.
/// Its real part is V; the imaginary part is O((kR)^3) and is built from
/// cancellation-free pieces.
inline CMat3 green_tensor(double k, const Vec3& rvec) {
  const double r = detail::checked_norm(rvec);
  const Vec3 u = rvec / r;
  const double x = k * r;
  const double c = std::cos(x), s = std::sin(x);
  const std::complex<double> dipole(c + x * s, detail::sin_minus_xcos(x));
  const std::complex<double> transverse(-x * x * c, -x * x * s);
  CMat3 g = detail::projector_dipole(u).cast<std::complex<double>>() * dipole +
            detail::projector_transverse(u).cast<std::complex<double>>() * transverse;
  return g / (r * r * r);
}

/// The same tensor continued to k = i xi: [(delta - 3RR)(1 + xi R) + (delta - RR)(xi R)^2]
/// e^{-xi R} / R^3. Real.
inline Mat3 green_tensor_imaginary(double xi, const Vec3& rvec) {
  const double r = detail::checked_norm(rvec);
  const Vec3 u = rvec / r;
  const double y = xi * r;
  return (detail::projector_dipole(u) * (1.0 + y) + detail::projector_transverse(u) * y * y) *
         std::exp(-y) / (r * r * r);
}

/// Fixed-width 3x3 debug rendering.
inline std::string format_tensor(const DipoleTensor& t) {
  std::string out = std::string(to_string(t.kind)) + " (k = " + std::to_string(t.wavenumber) +
                    ")\n";
  char buf[64];
  for (int l = 0; l < 3; ++l) {
    out += "[";
    for (int m = 0; m < 3; ++m) {
      std::snprintf(buf, sizeof buf, " %+16.9e", t.value(l, m));
      out += buf;
    }
    out += " ]\n";
  }
  return out;
}

}  // namespace casimir

#endif  // CASIMIR_TENSORS_HPP
