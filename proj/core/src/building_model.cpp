#include "thermalign/building_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "thermalign/error.hpp"

namespace thermalign {
namespace {

constexpr double kBoundaryTolerance = 1e-9;

Vector3 newell_normal(const Ring& ring) {
  Vector3 n = Vector3::Zero();
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point3& a = ring[i];
    const Point3& b = ring[(i + 1) % ring.size()];
    n.x() += (a.y() - b.y()) * (a.z() + b.z());
    n.y() += (a.z() - b.z()) * (a.x() + b.x());
    n.z() += (a.x() - b.x()) * (a.y() + b.y());
  }
  return n;
}

double segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

bool on_boundary(const Eigen::Vector2d& p, const Ring2& ring) {
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (segment_distance(p, ring[i], ring[(i + 1) % ring.size()]) <= kBoundaryTolerance) return true;
  }
  return false;
}

bool crossing_inside(const Eigen::Vector2d& p, const Ring2& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Eigen::Vector2d& a = ring[i];
    const Eigen::Vector2d& b = ring[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

PlaneFrame surface_plane_frame(const SemanticSurface& surface) {
  const Ring& ring = surface.outer;
  if (ring.size() < 3) {
    throw Error(ErrorCode::DegenerateSurface, "surface '" + surface.id + "' has fewer than 3 vertices");
  }

  Point3 lo = ring.front();
  Point3 hi = ring.front();
  Point3 mean = Point3::Zero();
  for (const auto& p : ring) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
    mean += p;
  }
  mean /= static_cast<double>(ring.size());
  const double scale = std::max(1.0, (hi - lo).norm());

  const Vector3 newell = newell_normal(ring);
  if (newell.norm() <= 1e-12 * scale * scale) {
    throw Error(ErrorCode::DegenerateSurface, "surface '" + surface.id + "' is degenerate (collinear ring)");
  }

  Eigen::MatrixXd centered(3, ring.size());
  for (std::size_t i = 0; i < ring.size(); ++i) centered.col(static_cast<Eigen::Index>(i)) = ring[i] - mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  Vector3 normal = svd.matrixU().col(2);
  if (normal.dot(newell) < 0.0) normal = -normal;

  PlaneFrame frame;
  frame.origin = mean;
  frame.normal = normal.normalized();

  // u is the in-plane projection of the dominant world axis; ties go to
  // the lower axis so vertical walls get a horizontal u.
  int best_axis = 0;
  double best_len = -1.0;
  for (int k = 0; k < 3; ++k) {
    const Vector3 axis = Vector3::Unit(k);
    const double len = (axis - axis.dot(frame.normal) * frame.normal).norm();
    if (len > best_len + 1e-12) {
      best_len = len;
      best_axis = k;
    }
  }
  const Vector3 axis = Vector3::Unit(best_axis);
  frame.u = (axis - axis.dot(frame.normal) * frame.normal).normalized();
  frame.v = frame.normal.cross(frame.u).normalized();
  return frame;
}

bool point_in_polygon(const Eigen::Vector2d& uv, const Ring2& outer, const std::vector<Ring2>& holes) {
  if (outer.size() < 3) return false;
  if (on_boundary(uv, outer)) return true;
  if (!crossing_inside(uv, outer)) return false;
  for (const auto& hole : holes) {
    if (hole.size() < 3) continue;
    if (on_boundary(uv, hole)) return true;
    if (crossing_inside(uv, hole)) return false;
  }
  return true;
}

void BuildingModel::validate() const {
  if (surfaces.empty()) throw Error(ErrorCode::InvalidParameter, "building model has no surfaces");
  std::set<std::string> ids;
  for (const auto& s : surfaces) {
    if (s.id.empty()) throw Error(ErrorCode::InvalidParameter, "surface with empty id");
    if (!ids.insert(s.id).second) {
      throw Error(ErrorCode::InvalidParameter, "duplicate surface id '" + s.id + "'");
    }
    if (s.label == SemanticClass::Unlabeled) {
      throw Error(ErrorCode::InvalidParameter, "surface '" + s.id + "' is labelled unlabeled");
    }
    const PlaneFrame frame = surface_plane_frame(s);
    auto check_ring = [&](const Ring& ring, const char* what) {
      if (ring.size() < 3) {
        throw Error(ErrorCode::DegenerateSurface,
                    "surface '" + s.id + "' has a " + what + " ring with fewer than 3 vertices");
      }
      for (const auto& p : ring) {
        if (!p.allFinite()) throw Error(ErrorCode::InvalidParameter, "non-finite vertex in '" + s.id + "'");
        if (std::abs(frame.residual(p)) > kCoplanarTolerance) {
          throw Error(ErrorCode::DegenerateSurface, "surface '" + s.id + "' is not planar");
        }
      }
    };
    check_ring(s.outer, "outer");
    Ring2 outer2;
    for (const auto& p : s.outer) outer2.push_back(frame.to_uv(p));
    for (const auto& hole : s.holes) {
      check_ring(hole, "hole");
      for (const auto& p : hole) {
        if (!point_in_polygon(frame.to_uv(p), outer2, {})) {
          throw Error(ErrorCode::InvalidParameter, "surface '" + s.id + "' has a hole outside its outer ring");
        }
      }
    }
  }
}

}  // namespace thermalign
