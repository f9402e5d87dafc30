#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "thermalign/geometry.hpp"

namespace thermalign {

using Ring = std::vector<Point3>;
using Ring2 = std::vector<Eigen::Vector2d>;

/// One planar B-Rep polygon (outer ring plus holes) of a semantic object.
/// Rings are stored open: the closing vertex is implied.
struct SemanticSurface {
  Ring outer;
  std::vector<Ring> holes;
  SemanticClass label = SemanticClass::Wall;
  std::string id;
};

struct BuildingModel {
  std::vector<SemanticSurface> surfaces;

  /// Checks: at least one surface, unique ids, >= 3 vertices per ring,
  /// coplanarity within kCoplanarTolerance, holes inside the outer ring.
  void validate() const;
};

inline constexpr double kCoplanarTolerance = 1e-6;

/// Orthonormal in-plane frame of a surface. `normal` follows the outer
/// ring's orientation (Newell's method), so counter-clockwise rings seen
/// from outside give outward normals.
struct PlaneFrame {
  Point3 origin = Point3::Zero();
  Vector3 u = Vector3::UnitX();
  Vector3 v = Vector3::UnitY();
  Vector3 normal = Vector3::UnitZ();

  Eigen::Vector2d to_uv(const Point3& p) const {
    const Vector3 d = p - origin;
    return {d.dot(u), d.dot(v)};
  }
  Point3 to_world(const Eigen::Vector2d& uv) const { return origin + uv.x() * u + uv.y() * v; }
  double residual(const Point3& p) const { return (p - origin).dot(normal); }
};

/// Throws Error(DegenerateSurface) when the outer ring spans no plane.
PlaneFrame surface_plane_frame(const SemanticSurface& surface);

/// Even-odd membership with boundary points counted as inside the surface:
/// on the outer boundary -> true, on a hole boundary -> true, strictly
/// inside a hole -> false.
bool point_in_polygon(const Eigen::Vector2d& uv, const Ring2& outer, const std::vector<Ring2>& holes);

}  // namespace thermalign
