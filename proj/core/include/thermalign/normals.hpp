#pragma once

#include <cstdint>
#include <vector>

#include "thermalign/geometry.hpp"
#include "thermalign/kdtree.hpp"

namespace thermalign {

/// Per-point unit normals aligned with a cloud. Points whose neighbourhood
/// was too small keep a zero normal and `valid[i] == 0`.
struct NormalCloud {
  std::vector<Vector3> normals;
  std::vector<std::uint8_t> valid;

  std::size_t size() const noexcept { return normals.size(); }
  bool empty() const noexcept { return normals.empty(); }
  bool is_valid(std::size_t i) const noexcept { return valid[i] != 0; }
  std::size_t valid_count() const noexcept;
};

/// PCA normals: the smallest-eigenvalue eigenvector of the covariance of all
/// neighbours within `radius` (the point itself included). Each normal is
/// flipped to face `viewpoint`.
NormalCloud estimate_normals(const PointCloud& cloud, double radius, int min_neighbors,
                             const Point3& viewpoint = Point3::Zero());

NormalCloud estimate_normals(const PointCloud& cloud, const SpatialIndex& index, double radius, int min_neighbors,
                             const Point3& viewpoint = Point3::Zero());

}  // namespace thermalign
