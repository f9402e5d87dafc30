#include <algorithm>
#include <cmath>
#include <numbers>

#include "thermalign/error.hpp"
#include "thermalign/fine_registration.hpp"

namespace thermalign {
namespace {

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

bool near_horizontal(const Plane& plane, const RectifyParams& params) {
  return std::abs(plane.normal.z()) >= std::cos(deg2rad(params.horizontal_tolerance_degrees));
}

}  // namespace

double height_percentile(const PointCloud& cloud, double percentile) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyInput, "height percentile of an empty cloud");
  std::vector<double> z;
  z.reserve(cloud.size());
  for (const auto& p : cloud.points) z.push_back(p.z());
  std::sort(z.begin(), z.end());
  const double rank = std::clamp(percentile, 0.0, 100.0) / 100.0 * static_cast<double>(z.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, z.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return z[lo] + frac * (z[hi] - z[lo]);
}

std::optional<Plane> select_main_plane(const std::vector<Plane>& planes, const RectifyParams& params) {
  for (const auto& p : planes) {
    if (!near_horizontal(p, params)) return p;
  }
  return std::nullopt;
}

RectifyResult rectify(const PointCloud& source, const Plane& source_plane, const PointCloud& target,
                      const Plane& target_plane, const RectifyParams& params) {
  RectifyResult out;
  if (near_horizontal(source_plane, params) || near_horizontal(target_plane, params)) {
    out.skipped = true;
    out.warning = "main plane is near-horizontal; rectification skipped";
    return out;
  }
  if (std::abs(source_plane.normal.dot(target_plane.normal)) < std::cos(deg2rad(params.max_plane_disagreement_degrees))) {
    out.skipped = true;
    out.warning = "source and target main planes disagree in orientation; rectification skipped";
    return out;
  }

  const double dz = height_percentile(target, params.ground_percentile) -
                    height_percentile(source, params.ground_percentile);
  const Vector3 horizontal = Vector3(target_plane.normal.x(), target_plane.normal.y(), 0.0).normalized();
  const double along = (target_plane.centroid - source_plane.centroid).dot(horizontal);
  out.transform.translation = along * horizontal + Vector3(0.0, 0.0, dz);
  return out;
}

}  // namespace thermalign
