#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "thermalign/geometry.hpp"

namespace thermalign {

struct RansacParams {
  double distance_threshold = 0.05;
  /// Upper bound on hypotheses per plane; sampling stops earlier once the
  /// best model is found with `confidence`.
  std::size_t iterations = 1000;
  double confidence = 0.999;
  /// A plane must explain at least this fraction of the input cloud.
  double min_inlier_fraction = 0.05;
  std::size_t plane_count = 3;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Sequential RANSAC: each round samples non-collinear triplets, keeps the
/// hypothesis with most inliers, refits it by least squares and takes the
/// remaining points within the threshold of the refit plane as its inliers,
/// which are then removed. Planes come back ordered by inlier count.
/// Throws Error(NoPlane) when not even one plane meets the inlier fraction.
std::vector<Plane> ransac_plane(const PointCloud& cloud, const RansacParams& params);

/// Least-squares plane through `points` (smallest principal axis).
Plane fit_plane(const std::vector<Point3>& points);

}  // namespace thermalign
