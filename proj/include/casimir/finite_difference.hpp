#ifndef CASIMIR_FINITE_DIFFERENCE_HPP
#define CASIMIR_FINITE_DIFFERENCE_HPP

#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "casimir/errors.hpp"

// Central differences with Ridders/Richardson extrapolation. These are oracles: they
// validate every analytic derivative table and tensor closed form in the library, so
// they deliberately share no code with those paths. Evaluate in long double where the
// caller can.

namespace casimir::fd {

template <class Real>
struct Derivative {
  Real value;
  Real error;
};

namespace detail {

// Central stencil for the n-th derivative; truncation error is even in h.
template <class Real, class F>
Real central_stencil(const F& f, Real x, int order, Real h) {
  switch (order) {
    case 0: return f(x);
    case 1: return (f(x + h) - f(x - h)) / (2 * h);
    case 2: return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
    case 3: return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h * h * h);
    case 4:
      return (f(x + 2 * h) - 4 * f(x + h) + 6 * f(x) - 4 * f(x - h) + f(x - 2 * h)) /
             (h * h * h * h);
    default: throw DomainError("finite differences support derivative orders 0..4");
  }
}

// Ridders' tableau over a shrinking step; `estimate(h)` has an even-power error series.
template <class Real, class G>
Derivative<Real> ridders(const G& estimate, Real h0) {
  constexpr int ntab = 12;
  constexpr Real shrink = Real(1.4);
  constexpr Real shrink2 = shrink * shrink;
  std::array<std::array<Real, ntab>, ntab> a{};
  Real h = h0;
  a[0][0] = estimate(h);
  Derivative<Real> best{a[0][0], std::numeric_limits<Real>::max()};
  bool improved = false;
  for (int i = 1; i < ntab; ++i) {
    h /= shrink;
    a[0][i] = estimate(h);
    Real fac = shrink2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1);
      fac *= shrink2;
      const Real err = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (err <= best.error) {
        best = {a[j][i], err};
        improved = true;
      }
    }
    // Higher order got worse by a wide margin: rounding has taken over.
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2 * best.error) break;
  }
  if (!improved)
    throw ConvergenceError("finite differences: Richardson sequence never improved (cancellation)");
  return best;
}

}  // namespace detail

/// n-th derivative (n <= 4) of a scalar function at x, starting from step h0.
template <class Real, class F>
Derivative<Real> derivative(const F& f, Real x, int order, Real h0) {
  if (!(h0 > 0) || x + h0 / Real(4096) == x)
    throw DomainError("finite differences: initial step underflows at this point");
  if (order == 0) return {f(x), 0};
  return detail::ridders<Real>(
      [&](Real h) { return detail::central_stencil<Real>(f, x, order, h); }, h0);
}

template <class Real>
using Vec3 = Eigen::Matrix<Real, 3, 1>;
template <class Real>
using Mat3 = Eigen::Matrix<Real, 3, 3>;

/// Hessian d^2 f / dx_l dx_m of a scalar field at `p` with Richardson extrapolation.
template <class Real, class F>
Mat3<Real> hessian(const F& f, const Vec3<Real>& p, Real h0, Mat3<Real>* error = nullptr) {
  Mat3<Real> out;
  Mat3<Real> err;
  for (int l = 0; l < 3; ++l) {
    for (int m = l; m < 3; ++m) {
      Derivative<Real> d;
      if (l == m) {
        d = detail::ridders<Real>(
            [&](Real h) {
              Vec3<Real> e = Vec3<Real>::Zero();
              e[l] = h;
              return (f(Vec3<Real>(p + e)) - 2 * f(p) + f(Vec3<Real>(p - e))) / (h * h);
            },
            h0);
      } else {
        d = detail::ridders<Real>(
            [&](Real h) {
              Vec3<Real> el = Vec3<Real>::Zero(), em = Vec3<Real>::Zero();
              el[l] = h;
              em[m] = h;
              return (f(Vec3<Real>(p + el + em)) - f(Vec3<Real>(p + el - em)) -
                      f(Vec3<Real>(p - el + em)) + f(Vec3<Real>(p - el - em))) /
                     (4 * h * h);
            },
            h0);
      }
      out(l, m) = out(m, l) = d.value;
      err(l, m) = err(m, l) = d.error;
    }
  }
  if (error) *error = err;
  return out;
}

/// (nabla^2 delta_lm - nabla_l nabla_m) f at `p`, numerically.
template <class Real, class F>
Mat3<Real> transverse_operator(const F& f, const Vec3<Real>& p, Real h0) {
  const Mat3<Real> hess = hessian<Real>(f, p, h0);
  return hess.trace() * Mat3<Real>::Identity() - hess;
}

}  // namespace casimir::fd

#endif  // CASIMIR_FINITE_DIFFERENCE_HPP
