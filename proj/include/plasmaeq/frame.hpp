#ifndef PLASMAEQ_FRAME_HPP
#define PLASMAEQ_FRAME_HPP

#include <cmath>
#include <utility>

#include "plasmaeq/errors.hpp"
#include "plasmaeq/vec3.hpp"

namespace plasmaeq {

enum class FrameKind { cartesian, cylindrical, spherical, helical };

/// Coordinate frame. Coordinate triples are
///   cylindrical (r, phi, z), spherical (rho, theta, phi),
///   helical (r, phi, u) with z = u + gamma * phi.
/// Helical vector components use the cylindrical basis (e_r, e_phi, e_z).
struct Frame {
  FrameKind kind = FrameKind::cartesian;
  double gamma = 0.0;

  static Frame cartesian() { return {}; }
  static Frame cylindrical() { return {FrameKind::cylindrical, 0.0}; }
  static Frame spherical() { return {FrameKind::spherical, 0.0}; }
  static Frame helical(double gamma) {
    if (gamma == 0.0) throw InvalidParameter("helical frame requires gamma != 0");
    return {FrameKind::helical, gamma};
  }
};

struct CylindricalBasis {
  Vec3 e_r, e_phi, e_z;
};

inline CylindricalBasis cylindrical_basis(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {{c, s, 0.0}, {-s, c, 0.0}, {0.0, 0.0, 1.0}};
}

struct SphericalBasis {
  Vec3 e_rho, e_theta, e_phi;
};

inline SphericalBasis spherical_basis(double theta, double phi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  return {{st * cp, st * sp, ct}, {ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

/// Position and vector components in `frame` to Cartesian.
inline std::pair<Point3, Vec3> frame_to_cartesian(const Frame& frame, const Vec3& coords,
                                                  const Vec3& components) {
  switch (frame.kind) {
    case FrameKind::cartesian:
      return {coords, components};
    case FrameKind::cylindrical:
    case FrameKind::helical: {
      const double r = coords[0], phi = coords[1];
      if (r <= 0.0) throw SingularAxisError("cylindrical basis undefined at r <= 0");
      const double z = frame.kind == FrameKind::helical ? coords[2] + frame.gamma * phi : coords[2];
      const auto b = cylindrical_basis(phi);
      const Point3 x{r * b.e_r.x, r * b.e_r.y, z};
      return {x, components[0] * b.e_r + components[1] * b.e_phi + components[2] * b.e_z};
    }
    case FrameKind::spherical: {
      const double rho = coords[0], theta = coords[1], phi = coords[2];
      if (rho <= 0.0) throw SingularAxisError("spherical basis undefined at rho <= 0");
      const auto b = spherical_basis(theta, phi);
      return {rho * b.e_rho,
              components[0] * b.e_rho + components[1] * b.e_theta + components[2] * b.e_phi};
    }
  }
  return {coords, components};
}

struct CylindricalPoint {
  double r = 0.0, phi = 0.0, z = 0.0;
};

inline CylindricalPoint to_cylindrical(const Point3& p) {
  return {std::hypot(p.x, p.y), std::atan2(p.y, p.x), p.z};
}

inline Point3 from_cylindrical(const CylindricalPoint& c) {
  return {c.r * std::cos(c.phi), c.r * std::sin(c.phi), c.z};
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_FRAME_HPP
