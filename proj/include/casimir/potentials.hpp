#ifndef CASIMIR_POTENTIALS_HPP
#define CASIMIR_POTENTIALS_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "casimir/atoms.hpp"
#include "casimir/errors.hpp"
#include "casimir/geometry.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/radial_operators.hpp"
#include "casimir/tensors.hpp"

namespace casimir {

enum class Method {
  full_integral,
  matsubara_oracle,
  near_zone,
  far_zone_qr,
  limit_high_t,
  limit_zero_t,
  limit_mixed,
  zero_t_far,
};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::full_integral: return "full-integral";
    case Method::matsubara_oracle: return "matsubara-oracle";
    case Method::near_zone: return "near-zone";
    case Method::far_zone_qr: return "far-zone-QR";
    case Method::limit_high_t: return "limit-high-T";
    case Method::limit_zero_t: return "limit-zero-T";
    case Method::limit_mixed: return "limit-mixed";
    case Method::zero_t_far: return "zero-T-far";
  }
  return "?";
}

enum class RegimeLabel { near_zone, far_low_t, far_mixed, far_high_t, crossover };

inline std::string_view to_string(RegimeLabel r) {
  switch (r) {
    case RegimeLabel::near_zone: return "near-zone";
    case RegimeLabel::far_low_t: return "far-zone-low-T";
    case RegimeLabel::far_mixed: return "far-zone-mixed";
    case RegimeLabel::far_high_t: return "far-zone-high-T";
    case RegimeLabel::crossover: return "crossover";
  }
  return "?";
}

/// Direct (atom-atom), image (atom-image) and cross contributions near a wall.
struct TermBreakdown {
  double direct = 0.0;
  double image = 0.0;
  double cross = 0.0;
  double direct_error = 0.0;
  double image_error = 0.0;
  double cross_error = 0.0;

  double total() const { return direct + image + cross; }
};

struct PotentialResult {
  double energy = 0.0;
  Method method = Method::full_integral;
  RegimeLabel regime = RegimeLabel::crossover;
  double error_estimate = 0.0;  // 0 for closed forms
  std::optional<TermBreakdown> terms;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
};

// ---------------------------------------------------------------------------------------
// Regimes

inline constexpr double default_regime_margin = 10.0;

/// Which of the defining inequalities hold, at margin m.
struct RegimeInequalities {
  double margin = default_regime_margin;
  bool near = false;        // R k_max <= 1/m
  bool far = false;         // R k_min >= m
  bool direct_low = false;  // R <= lambda_T / m  (always true at T = 0)
  bool image_low = false;   // Rbar <= lambda_T / m
  bool direct_high = false; // R >= m lambda_T
  bool image_high = false;  // Rbar >= m lambda_T
};

inline RegimeInequalities regime_inequalities(double r, std::optional<double> rbar,
                                              const ThermalBath& bath, const AtomModel& a,
                                              const AtomModel& b,
                                              double margin = default_regime_margin) {
  if (!(margin >= 1.0)) throw DomainError("regime margin must be >= 1");
  const double rb = rbar.value_or(r);
  const double k_min = std::min(a.min_wavenumber(), b.min_wavenumber());
  const double k_max = std::max(a.max_wavenumber(), b.max_wavenumber());
  RegimeInequalities q;
  q.margin = margin;
  q.near = r * k_max <= 1.0 / margin;
  q.far = r * k_min >= margin;
  if (bath.is_zero()) {
    q.direct_low = q.image_low = true;
  } else {
    const double lambda = thermal_length(bath);
    q.direct_low = r <= lambda / margin;
    q.image_low = rb <= lambda / margin;
    q.direct_high = r >= margin * lambda;
    q.image_high = rb >= margin * lambda;
  }
  return q;
}

inline RegimeLabel classify(const RegimeInequalities& q, bool wall) {
  if (q.near) return RegimeLabel::near_zone;
  if (!q.far) return RegimeLabel::crossover;
  if (q.direct_low && q.image_low) return RegimeLabel::far_low_t;
  if (q.direct_high && q.image_high) return RegimeLabel::far_high_t;
  if (wall && q.direct_low && q.image_high) return RegimeLabel::far_mixed;
  return RegimeLabel::crossover;
}

/// Free-space classification (R alone).
inline RegimeLabel classify_regime(double r, const ThermalBath& bath, const AtomModel& a,
                                   const AtomModel& b, double margin = default_regime_margin) {
  return classify(regime_inequalities(r, std::nullopt, bath, a, b, margin), false);
}

/// Wall classification: R for the atomic scales, R and Rbar against lambda_T.
inline RegimeLabel classify_regime(const WallConfiguration& cfg, const ThermalBath& bath,
                                   const AtomModel& a, const AtomModel& b,
                                   double margin = default_regime_margin) {
  const Separations s = separations(cfg);
  return classify(regime_inequalities(s.direct, s.image, bath, a, b, margin), true);
}

// ---------------------------------------------------------------------------------------
// Real-axis spectral integrals

namespace detail {

inline void require_damping_for_real_axis(const AtomModel& a) {
  if (!a.is_static() && a.damping() == 0.0)
    throw ResonanceError(
        "real-axis spectral integral needs a damped polarizability (gamma > 0) to pass the "
        "resonance poles");
}

inline std::vector<Feature> resonance_features(const AtomModel& a, const AtomModel& b) {
  std::vector<Feature> out;
  for (const AtomModel* m : {&a, &b}) {
    if (m->is_static()) continue;
    for (const auto& t : m->transitions()) out.push_back({t.wavenumber, m->damping()});
  }
  return out;
}

struct SpectralValue {
  double value;
  double error;
};

// (1/pi) Im int_0^inf alpha_A(k) alpha_B(k) coth(k/2T) K(k) dk, where K carries the
// phase e^{2ikL}. A nonzero `reference_energy` judges convergence against that energy
// rather than the value itself (for terms of a sum).
template <class Kernel>
SpectralValue spectral_integral(const AtomModel& a, const AtomModel& b, const ThermalBath& bath,
                                double length, const Kernel& kernel, const QuadratureOptions& opts,
                                double reference_energy = 0.0) {
  require_damping_for_real_axis(a);
  require_damping_for_real_axis(b);
  const auto features = resonance_features(a, b);
  auto f = [&](double k) {
    return retarded_polarizability(a, k) * retarded_polarizability(b, k) * coth_factor(k, bath) *
           kernel(k);
  };
  QuadratureOptions o = opts;
  o.reference_scale = std::max(o.reference_scale, std::numbers::pi * std::abs(reference_energy));
  const IntegralEstimate est = oscillatory_integral(f, length, features, o, Component::imaginary);
  return {est.value.imag() / std::numbers::pi, est.error / std::numbers::pi};
}

// -1/2 tr(A A) for the free-space Green tensor A: -(1/R^6)[x^3 Bc(x) + i x^3 B(x)], x = kR,
// with B the interaction bracket.
inline std::complex<double> direct_kernel(double k, double r) {
  const double x = k * r;
  const double r6 = std::pow(r, 6);
  const double c = std::cos(2.0 * x), s = std::sin(2.0 * x);
  const double x2 = x * x;
  const double re = (x2 * x2 - 5.0 * x2 + 3.0) * c - (2.0 * x2 * x - 6.0 * x) * s;
  const double im = x2 * x * interaction_bracket(x);
  return -std::complex<double>(re, im) / r6;
}

// tr(sigma A(R) A(Rbar)) via the projector decomposition
//   A(R) = [P3 a(kR) + P1 b(kR)] / R^3,  a = (1 - ix) e^{ix},  b = -x^2 e^{ix},
// with P3 = delta - 3RR, P1 = delta - RR; the four traces tr(sigma P P') are fixed.
class CrossKernel {
 public:
  CrossKernel(const Vec3& direct, const Vec3& image) {
    r_ = direct.norm();
    rb_ = image.norm();
    const Vec3 u = direct / r_, v = image / rb_;
    const Mat3 s = reflection_matrix();
    const Mat3 p3 = Mat3::Identity() - 3.0 * u * u.transpose();
    const Mat3 p1 = Mat3::Identity() - u * u.transpose();
    const Mat3 q3 = Mat3::Identity() - 3.0 * v * v.transpose();
    const Mat3 q1 = Mat3::Identity() - v * v.transpose();
    t33_ = (s * p3 * q3).trace();
    t31_ = (s * p3 * q1).trace();
    t13_ = (s * p1 * q3).trace();
    t11_ = (s * p1 * q1).trace();
  }

  std::complex<double> operator()(double k) const {
    const auto [a, b] = pieces(k * r_);
    const auto [ab, bb] = pieces(k * rb_);
    return (a * ab * t33_ + a * bb * t31_ + b * ab * t13_ + b * bb * t11_) /
           std::pow(r_ * rb_, 3);
  }

  double length() const { return 0.5 * (r_ + rb_); }

 private:
  static std::pair<std::complex<double>, std::complex<double>> pieces(double x) {
    const double c = std::cos(x), s = std::sin(x);
    return {{c + x * s, sin_minus_xcos(x)}, {-x * x * c, -x * x * s}};
  }

  double r_, rb_;
  double t33_, t31_, t13_, t11_;
};

inline void append_thermal_warnings(PotentialResult& out, const AtomModel& a, const AtomModel& b,
                                    const ThermalBath& bath) {
  for (const AtomModel* m : {&a, &b})
    if (auto w = thermal_excitation_warning(*m, bath)) {
      out.warnings.push_back(*w);
      break;
    }
}

inline double alpha0_product(const AtomModel& a, const AtomModel& b) {
  return static_polarizability(a) * static_polarizability(b);
}

inline void warn_unless_far(PotentialResult& out, double r, const AtomModel& a, const AtomModel& b,
                            double margin = default_regime_margin) {
  const double k_min = std::min(a.min_wavenumber(), b.min_wavenumber());
  if (r * k_min < margin) {
    std::ostringstream os;
    os << "R k_min = " << r * k_min << " is not >> 1; far-zone formula outside its regime";
    out.warnings.push_back(os.str());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------------------
// Free space

/// Full thermal spectral integral, valid at any distance:
///   W = -(1/(pi R^3)) int_0^inf k^3 alpha_A alpha_B coth(k/2T) B(kR) dk,
/// realized as (1/pi) Im of the same integral with the retarded polarizabilities and the
/// complex kernel -1/2 tr(A A), which makes the damped resonances integrable.
inline PotentialResult free_space_full(const AtomModel& a, const AtomModel& b, double r,
                                       const ThermalBath& bath, const QuadratureOptions& opts = {}) {
  (void)FreeSpaceConfiguration{r};
  const auto v = detail::spectral_integral(
      a, b, bath, r, [r](double k) { return detail::direct_kernel(k, r); }, opts);
  PotentialResult out;
  out.energy = v.value;
  out.error_estimate = v.error;
  out.method = Method::full_integral;
  out.regime = classify_regime(r, bath, a, b);
  detail::append_thermal_warnings(out, a, b, bath);
  return out;
}

/// Near-zone (kR << 1) form
///   W = -(3/(pi R^6)) int_0^inf alpha_A alpha_B coth(k/2T) sin 2kR dk.
inline PotentialResult free_space_near_zone(const AtomModel& a, const AtomModel& b, double r,
                                            const ThermalBath& bath,
                                            const QuadratureOptions& opts = {}) {
  (void)FreeSpaceConfiguration{r};
  const double r6 = std::pow(r, 6);
  const auto v = detail::spectral_integral(
      a, b, bath, r,
      [r, r6](double k) { return -3.0 * std::exp(std::complex<double>(0.0, 2.0 * k * r)) / r6; },
      opts);
  PotentialResult out;
  out.energy = v.value;
  out.error_estimate = v.error;
  out.method = Method::near_zone;
  out.regime = classify_regime(r, bath, a, b);
  const double k_max = std::max(a.max_wavenumber(), b.max_wavenumber());
  if (r * k_max > 1.0 / default_regime_margin) {
    std::ostringstream os;
    os << "R k_max = " << r * k_max << " is not << 1; near-zone formula outside its regime";
    out.warnings.push_back(os.str());
  }
  detail::append_thermal_warnings(out, a, b, bath);
  return out;
}

/// T = 0 far zone: -23 alpha_A(0) alpha_B(0) / (4 pi R^7).
inline PotentialResult zero_T_far_zone(const AtomModel& a, const AtomModel& b, double r) {
  (void)FreeSpaceConfiguration{r};
  PotentialResult out;
  out.energy = -23.0 * detail::alpha0_product(a, b) / (4.0 * std::numbers::pi * std::pow(r, 7));
  out.method = Method::zero_t_far;
  out.regime = classify_regime(r, ThermalBath::zero(), a, b);
  detail::warn_unless_far(out, r, a, b);
  return out;
}

/// Far zone at T > 0: alpha_A(0) alpha_B(0) T Q^R coth(R / lambda_T). T = 0 is routed to
/// zero_T_far_zone.
inline PotentialResult free_space_far_zone(const AtomModel& a, const AtomModel& b, double r,
                                           const ThermalBath& bath) {
  if (bath.is_zero()) return zero_T_far_zone(a, b, r);
  (void)FreeSpaceConfiguration{r};
  const double lambda = thermal_length(bath);
  PotentialResult out;
  out.energy = detail::alpha0_product(a, b) * bath.temperature() * apply_QR(coth_jet(r, lambda), r);
  out.method = Method::far_zone_qr;
  out.regime = classify_regime(r, bath, a, b);
  detail::warn_unless_far(out, r, a, b);
  detail::append_thermal_warnings(out, a, b, bath);
  return out;
}

/// R >> lambda_T without a wall: -3 alpha_A(0) alpha_B(0) T / R^6.
inline PotentialResult free_space_limit_high_T(const AtomModel& a, const AtomModel& b, double r,
                                               const ThermalBath& bath) {
  if (bath.is_zero()) throw DomainError("high-temperature limit needs T > 0");
  (void)FreeSpaceConfiguration{r};
  PotentialResult out;
  out.energy = -3.0 * detail::alpha0_product(a, b) * bath.temperature() / std::pow(r, 6);
  out.method = Method::limit_high_t;
  out.regime = classify_regime(r, bath, a, b);
  if (out.regime != RegimeLabel::far_high_t)
    out.warnings.push_back("high-temperature limit used outside its regime (classified " +
                           std::string(to_string(out.regime)) + ")");
  detail::append_thermal_warnings(out, a, b, bath);
  return out;
}

// ---------------------------------------------------------------------------------------
// Wall

/// Full three-term wall potential: the free-space integral at R (direct), the same form at
/// Rbar (image), and the cross term (1/pi) Im int alpha_A alpha_B coth tr(sigma A(R) A(Rbar)).
inline PotentialResult wall_full(const AtomModel& a, const AtomModel& b,
                                 const WallConfiguration& cfg, const ThermalBath& bath,
                                 const QuadratureOptions& opts = {}) {
  const Separations s = separations(cfg);
  const PotentialResult direct = free_space_full(a, b, s.direct, bath, opts);
  // Far from the wall the image and cross terms are many orders below the direct term;
  // their convergence is judged against it.
  const double ref = std::abs(direct.energy);
  const auto image = detail::spectral_integral(
      a, b, bath, s.image, [r = s.image](double k) { return detail::direct_kernel(k, r); }, opts, ref);
  const detail::CrossKernel kernel(cfg.direct_vector(), cfg.image_vector());
  const auto cross = detail::spectral_integral(a, b, bath, kernel.length(), kernel, opts, ref);

  PotentialResult out;
  out.terms = TermBreakdown{direct.energy, image.value, cross.value,
                            direct.error_estimate, image.error, cross.error};
  out.energy = out.terms->total();
  out.error_estimate = direct.error_estimate + image.error + cross.error;
  out.method = Method::full_integral;
  out.regime = classify_regime(cfg, bath, a, b);
  detail::append_thermal_warnings(out, a, b, bath);
  return out;
}

namespace detail {

inline PotentialResult wall_result(const TermBreakdown& t, Method m, const WallConfiguration& cfg,
                                   const ThermalBath& bath, const AtomModel& a, const AtomModel& b) {
  PotentialResult out;
  out.terms = t;
  out.energy = t.total();
  out.method = m;
  out.regime = classify_regime(cfg, bath, a, b);
  warn_unless_far(out, separations(cfg).direct, a, b);
  append_thermal_warnings(out, a, b, bath);
  return out;
}

inline void warn_regime(PotentialResult& out, RegimeLabel wanted, const char* formula) {
  if (out.regime != wanted) {
    out.warnings.push_back(std::string(formula) + " used outside its regime (classified " +
                           std::string(to_string(out.regime)) + ", expected " +
                           std::string(to_string(wanted)) + ")");
  }
}

}  // namespace detail

/// T = 0 far-zone wall potential:
///   W = -aa [23/(4 pi R^7) + 23/(4 pi Rbar^7)] + (aa/pi) sigma_ln D^R_lm D^Rbar_nm [1/(R Rbar (R + Rbar))].
inline PotentialResult limit_zero_T_wall(const AtomModel& a, const AtomModel& b,
                                         const WallConfiguration& cfg) {
  const Separations s = separations(cfg);
  const double aa = detail::alpha0_product(a, b);
  const double c = 23.0 / (4.0 * std::numbers::pi);
  TermBreakdown t;
  t.direct = -aa * c / std::pow(s.direct, 7);
  t.image = -aa * c / std::pow(s.image, 7);
  t.cross = aa / std::numbers::pi * reflected_cross_operator(inverse_jet(s.direct + s.image), cfg);
  auto out = detail::wall_result(t, Method::limit_zero_t, cfg, ThermalBath::zero(), a, b);
  detail::warn_regime(out, RegimeLabel::far_low_t, "zero-temperature wall limit");
  return out;
}

/// Far-zone wall potential at T > 0:
///   W = aa T [Q^R coth(R/lambda) + Q^Rbar coth(Rbar/lambda)]
///       + aa sigma_ln D^R_lm D^Rbar_nm [T coth((R + Rbar)/2 lambda) / (R Rbar)].
/// T = 0 is routed to limit_zero_T_wall.
inline PotentialResult wall_far_zone(const AtomModel& a, const AtomModel& b,
                                     const WallConfiguration& cfg, const ThermalBath& bath) {
  if (bath.is_zero()) return limit_zero_T_wall(a, b, cfg);
  const Separations s = separations(cfg);
  const double aa = detail::alpha0_product(a, b);
  const double t = bath.temperature();
  const double lambda = thermal_length(bath);
  TermBreakdown tb;
  tb.direct = aa * t * apply_QR(coth_jet(s.direct, lambda), s.direct);
  tb.image = aa * t * apply_QR(coth_jet(s.image, lambda), s.image);
  tb.cross = aa * reflected_cross_operator(t * coth_jet(s.direct + s.image, 2.0 * lambda), cfg);
  return detail::wall_result(tb, Method::far_zone_qr, cfg, bath, a, b);
}

/// R, Rbar >> lambda_T:
///   W = -aa T [3/R^6 + 3/Rbar^6 - (3 sin^2 theta + 3 sin^2 theta_bar - 2)/(R^3 Rbar^3)].
inline PotentialResult limit_high_T(const AtomModel& a, const AtomModel& b,
                                    const WallConfiguration& cfg, const ThermalBath& bath) {
  if (bath.is_zero()) throw DomainError("high-temperature limit needs T > 0");
  const Separations s = separations(cfg);
  const double aat = detail::alpha0_product(a, b) * bath.temperature();
  TermBreakdown t;
  t.direct = -3.0 * aat / std::pow(s.direct, 6);
  t.image = -3.0 * aat / std::pow(s.image, 6);
  t.cross = aat * cross_term_angular_closed_form(s);
  auto out = detail::wall_result(t, Method::limit_high_t, cfg, bath, a, b);
  detail::warn_regime(out, RegimeLabel::far_high_t, "high-temperature limit");
  return out;
}

/// R << lambda_T << Rbar:
///   W = -aa [23/(4 pi R^7) + 3T/Rbar^6 - T (3 sin^2 theta + 3 sin^2 theta_bar - 2)/(R^3 Rbar^3)].
inline PotentialResult limit_mixed(const AtomModel& a, const AtomModel& b,
                                   const WallConfiguration& cfg, const ThermalBath& bath) {
  if (bath.is_zero()) throw DomainError("mixed limit needs T > 0");
  const Separations s = separations(cfg);
  const double aa = detail::alpha0_product(a, b);
  const double temp = bath.temperature();
  TermBreakdown t;
  t.direct = -aa * 23.0 / (4.0 * std::numbers::pi * std::pow(s.direct, 7));
  t.image = -3.0 * aa * temp / std::pow(s.image, 6);
  t.cross = aa * temp * cross_term_angular_closed_form(s);
  auto out = detail::wall_result(t, Method::limit_mixed, cfg, bath, a, b);
  detail::warn_regime(out, RegimeLabel::far_mixed, "mixed limit");
  const double rest = std::abs(t.image + t.cross);
  if (rest * 100.0 < std::abs(t.direct)) {
    std::ostringstream os;
    os << "direct term dominates: image + cross are " << rest / std::abs(t.direct)
       << " of the direct term (wall effectively absent)";
    out.notes.push_back(os.str());
  }
  return out;
}

}  // namespace casimir

#endif  // CASIMIR_POTENTIALS_HPP
