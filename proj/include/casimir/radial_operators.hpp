#ifndef CASIMIR_RADIAL_OPERATORS_HPP
#define CASIMIR_RADIAL_OPERATORS_HPP

#include <array>
#include <cmath>
#include <concepts>

#include "casimir/errors.hpp"
#include "casimir/finite_difference.hpp"
#include "casimir/geometry.hpp"

namespace casimir {

/// Value and first four derivatives of a radial function at one point.
struct RadialJet {
  std::array<double, 5> d{};

  double operator[](int n) const { return d[n]; }
  RadialJet& operator*=(double s) {
    for (auto& v : d) v *= s;
    return *this;
  }
  friend RadialJet operator*(double s, RadialJet j) { return j *= s; }
};

inline RadialJet constant_jet(double c) { return {{c, 0.0, 0.0, 0.0, 0.0}}; }

/// 1/r
inline RadialJet inverse_jet(double r) {
  const double u = 1.0 / r;
  const double u2 = u * u;
  return {{u, -u2, 2.0 * u2 * u, -6.0 * u2 * u2, 24.0 * u2 * u2 * u}};
}

/// exp(-r / scale)
inline RadialJet exp_decay_jet(double r, double scale = 1.0) {
  const double e = std::exp(-r / scale), s = 1.0 / scale;
  return {{e, -s * e, s * s * e, -s * s * s * e, s * s * s * s * e}};
}

/// Argument of coth above which csch^2 (< 4 e^{-60}, relative) is dropped.
inline constexpr double coth_saturation = 30.0;

/// coth(r / scale). With c = coth x and s = csch^2 x = c^2 - 1:
///   c' = -s, c'' = 2cs, c''' = -2s^2 - 4c^2 s, c'''' = 16cs^2 + 8c^3 s.
/// For x > 30 every derivative is below 1e-24 relative and is set to 0 (s also
/// underflows long before overflow of sinh would matter).
inline RadialJet coth_jet(double r, double scale) {
  const double x = r / scale;
  if (!(x > 0.0)) throw DomainError("coth_jet requires r / scale > 0");
  if (x > coth_saturation) return constant_jet(1.0);
  const double sh = std::sinh(x);
  const double s = 1.0 / (sh * sh);
  const double c = std::cosh(x) / sh;
  const double k = 1.0 / scale;
  return {{c, -s * k, 2.0 * c * s * k * k, (-2.0 * s * s - 4.0 * c * c * s) * k * k * k,
           (16.0 * c * s * s + 8.0 * c * c * c * s) * k * k * k * k}};
}

/// Radial operator
///   Q^r f = -f''''/(16 r^2) + f'''/(4 r^3) - 5 f''/(4 r^4) + 3 f'/r^5 - 3 f/r^6.
/// Q^r 1 = -3/r^6 and Q^r (1/r) = -23/(2 r^7).
inline double apply_QR(const RadialJet& f, double r) {
  if (!(r > 0.0)) throw DomainError("Q^r is singular at r = 0");
  const double r2 = r * r;
  const double r4 = r2 * r2;
  return (-f[4] / 16.0 + f[3] / (4.0 * r) - 5.0 * f[2] / (4.0 * r2) + 3.0 * f[1] / (r2 * r) -
          3.0 * f[0] / r4) /
         r2;
}

/// Q^r applied to an arbitrary smooth function by Richardson-extrapolated central
/// differences (evaluated in long double). Independent of the analytic tables.
template <class F>
  requires std::invocable<const F&, long double>
double apply_QR(const F& f, double r) {
  if (!(r > 0.0)) throw DomainError("Q^r is singular at r = 0");
  const long double x = r;
  const long double h0 = 0.2L * x;
  RadialJet jet;
  jet.d[0] = static_cast<double>(f(x));
  for (int n = 1; n <= 4; ++n)
    jet.d[n] = static_cast<double>(fd::derivative<long double>(f, x, n, h0).value);
  return apply_QR(jet, r);
}

/// sigma_ln D^R_lm D^Rbar_nm [h(R + Rbar) / (R Rbar)], where D = nabla^2 delta - nabla nabla
/// acts on the direct separation vector R and on the image separation vector Rbar as
/// independent variables and `h` holds the derivatives of h at S = R + Rbar.
///
/// With D_lm psi = (psi'' + psi'/r) delta_lm - (psi'' - psi'/r) r_l r_m, the four
/// products of (delta, r r) pieces contract against sigma to
///   tr sigma = 1,  u.sigma.u,  v.sigma.v,  (u.v)(u.sigma.v)
/// (u, v unit vectors along R and Rbar). For h = const this is the angular factor
/// (3 sin^2 theta + 3 sin^2 theta_bar - 2)/(R^3 Rbar^3) times h.
inline double reflected_cross_operator(const RadialJet& h, const Vec3& direct, const Vec3& image) {
  const double r = direct.norm(), rb = image.norm();
  if (!(r > 0.0) || !(rb > 0.0)) throw DomainError("cross operator at zero separation");
  const Vec3 u = direct / r, v = image / rb;
  const Mat3 sigma = reflection_matrix();

  const std::array<double, 3> fu{1.0 / r, -1.0 / (r * r), 2.0 / (r * r * r)};
  const std::array<double, 3> fv{1.0 / rb, -1.0 / (rb * rb), 2.0 / (rb * rb * rb)};
  constexpr std::array<std::array<double, 3>, 3> binom{{{1, 0, 0}, {1, 1, 0}, {1, 2, 1}}};
  // psi[i][j] = d^i/dR^i d^j/dRbar^j of h(R + Rbar) / (R Rbar)
  double psi[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int p = 0; p <= i; ++p)
        for (int q = 0; q <= j; ++q)
          acc += binom[i][p] * binom[j][q] * h[p + q] * fu[i - p] * fv[j - q];
      psi[i][j] = acc;
    }
  const double t22 = psi[2][2], t21 = psi[2][1] / rb, t12 = psi[1][2] / r,
               t11 = psi[1][1] / (r * rb);
  const double aa = t22 + t21 + t12 + t11;
  const double ba = -t22 - t21 + t12 + t11;
  const double ab = -t22 + t21 - t12 + t11;
  const double bb = t22 - t21 - t12 + t11;
  return aa * sigma.trace() + ba * u.dot(sigma * u) + ab * v.dot(sigma * v) +
         bb * u.dot(v) * u.dot(sigma * v);
}

inline double reflected_cross_operator(const RadialJet& h, const WallConfiguration& cfg) {
  return reflected_cross_operator(h, cfg.direct_vector(), cfg.image_vector());
}

}  // namespace casimir

#endif  // CASIMIR_RADIAL_OPERATORS_HPP
