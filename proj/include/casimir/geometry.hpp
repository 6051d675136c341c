#ifndef CASIMIR_GEOMETRY_HPP
#define CASIMIR_GEOMETRY_HPP

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "casimir/errors.hpp"

namespace casimir {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Reflection on the conducting plane z = 0: sigma = diag(1, 1, -1).
inline Mat3 reflection_matrix() { return Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal(); }

inline Vec3 image_point(const Vec3& r) { return {r.x(), r.y(), -r.z()}; }

/// Two atoms in free space; only their separation matters.
class FreeSpaceConfiguration {
 public:
  explicit FreeSpaceConfiguration(double separation) : separation_(separation) {
    if (!(separation > 0.0) || !std::isfinite(separation))
      throw GeometryError("atom separation must be positive");
  }
  double separation() const noexcept { return separation_; }

 private:
  double separation_;
};

struct Separations {
  double direct;       // R     = |r_B - r_A|
  double image;        // R_bar = |r_B - sigma r_A|
  double theta;        // angle of r_B - r_A with the wall normal
  double theta_image;  // angle of r_B - sigma r_A with the wall normal
  double lateral;      // in-plane separation rho
};

/// Two atoms above a perfectly conducting wall at z = 0.
class WallConfiguration {
 public:
  static constexpr double default_height_floor = 1e-9;

  WallConfiguration(const Vec3& atom_a, const Vec3& atom_b,
                    double height_floor = default_height_floor)
      : a_(atom_a), b_(atom_b) {
    if (!a_.allFinite() || !b_.allFinite()) throw GeometryError("non-finite atom position");
    if (!(a_.z() > height_floor) || !(b_.z() > height_floor))
      throw GeometryError("atoms must sit above the wall (z > " + std::to_string(height_floor) +
                          ")");
    if (!((b_ - a_).norm() > 0.0)) throw GeometryError("atoms overlap (R = 0)");
  }

  const Vec3& atom_a() const noexcept { return a_; }
  const Vec3& atom_b() const noexcept { return b_; }

  Vec3 direct_vector() const { return b_ - a_; }
  Vec3 image_vector() const { return b_ - image_point(a_); }

  /// Same configuration with both atoms translated by `shift`.
  WallConfiguration translated(const Vec3& shift) const {
    return WallConfiguration(a_ + shift, b_ + shift);
  }

 private:
  Vec3 a_;
  Vec3 b_;
};

/// R, R_bar and the two wall-normal angles. Angles come from atan2(rho, dz), which
/// keeps full precision near 0 and pi.
inline Separations separations(const WallConfiguration& cfg) {
  const Vec3 d = cfg.direct_vector();
  const Vec3 e = cfg.image_vector();
  const double rho = std::hypot(d.x(), d.y());
  return {d.norm(), e.norm(), std::atan2(rho, d.z()), std::atan2(rho, e.z()), rho};
}

struct UnitSeparations {
  Vec3 direct;
  Vec3 image;
};

inline UnitSeparations unit_separation_vectors(const WallConfiguration& cfg) {
  return {cfg.direct_vector().normalized(), cfg.image_vector().normalized()};
}

}  // namespace casimir

#endif  // CASIMIR_GEOMETRY_HPP
