#pragma once

#include "thermalign/geometry.hpp"

namespace thermalign {

/// Replaces the points of each occupied voxel by their centroid. Output is
/// ordered by voxel key, so it does not depend on input order within a
/// voxel. Attributes are dropped. A voxel size <= 0 returns the positions
/// unchanged.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

}  // namespace thermalign
