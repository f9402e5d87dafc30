#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "thermalign/geometry.hpp"
#include "thermalign/kdtree.hpp"
#include "thermalign/transform.hpp"

namespace thermalign {

/// Fitness / RMSE of a registration at a correspondence threshold.
///
/// Each transformed source point contributes at most one correspondence:
/// its nearest target point, if within the threshold. Fitness divides the
/// correspondence count by the *target* size. With no inliers the RMSE is
/// NaN, since zero would read as a perfect alignment.
struct RegistrationMetrics {
  double fitness = 0.0;
  double rmse = std::numeric_limits<double>::quiet_NaN();
  std::size_t inlier_count = 0;

  bool has_rmse() const noexcept { return inlier_count > 0; }
};

RegistrationMetrics evaluate_registration(const PointCloud& source, const PointCloud& target,
                                          const RigidTransform& t, double threshold);

/// Same as above with a prebuilt index over `target`. `inliers`, when
/// given, receives the ascending source indices counted as inliers.
RegistrationMetrics evaluate_registration(const PointCloud& source, const PointCloud& target,
                                          const SpatialIndex& target_index,
                                          const RigidTransform& t, double threshold,
                                          std::vector<std::size_t>* inliers = nullptr);

}  // namespace thermalign
