#include "thermalign/normals.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "thermalign/error.hpp"
#include "thermalign/parallel.hpp"

namespace thermalign {

std::size_t NormalCloud::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

NormalCloud estimate_normals(const PointCloud& cloud, double radius, int min_neighbors, const Point3& viewpoint) {
  if (cloud.empty()) return {};
  return estimate_normals(cloud, build_index(cloud), radius, min_neighbors, viewpoint);
}

NormalCloud estimate_normals(const PointCloud& cloud, const SpatialIndex& index, double radius, int min_neighbors,
                             const Point3& viewpoint) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidParameter, "normal radius must be positive");
  NormalCloud out;
  out.normals.assign(cloud.size(), Vector3::Zero());
  out.valid.assign(cloud.size(), 0);
  const int min_count = std::max(min_neighbors, 3);

  const auto n = static_cast<std::ptrdiff_t>(cloud.size());
#pragma omp parallel num_threads(thread_count())
  {
    std::vector<SpatialIndex::Neighbor> nbrs;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const Point3& p = cloud.points[i];
      index.radius_search(p, radius, nbrs);
      if (static_cast<int>(nbrs.size()) < min_count) continue;

      Point3 mean = Point3::Zero();
      for (const auto& nb : nbrs) mean += cloud.points[nb.index];
      mean /= static_cast<double>(nbrs.size());
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (const auto& nb : nbrs) {
        const Vector3 d = cloud.points[nb.index] - mean;
        cov.noalias() += d * d.transpose();
      }
      cov /= static_cast<double>(nbrs.size());

      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
      if (solver.info() != Eigen::Success) continue;
      Vector3 normal = solver.eigenvectors().col(0).normalized();
      if (!normal.allFinite()) continue;
      if (normal.dot(viewpoint - p) < 0.0) normal = -normal;
      out.normals[i] = normal;
      out.valid[i] = 1;
    }
  }
  return out;
}

}  // namespace thermalign
