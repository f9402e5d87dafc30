#include "thermalign/ransac.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "thermalign/error.hpp"
#include "thermalign/parallel.hpp"

namespace thermalign {

void RansacParams::validate() const {
  if (!(distance_threshold > 0.0)) throw Error(ErrorCode::InvalidParameter, "RANSAC distance threshold must be positive");
  if (iterations < 1) throw Error(ErrorCode::InvalidParameter, "RANSAC needs at least one iteration");
  if (!(confidence > 0.0 && confidence <= 1.0)) throw Error(ErrorCode::InvalidParameter, "RANSAC confidence must lie in (0,1]");
  if (!(min_inlier_fraction >= 0.0 && min_inlier_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "RANSAC min inlier fraction must lie in [0,1]");
  }
  if (plane_count < 1) throw Error(ErrorCode::InvalidParameter, "RANSAC plane count must be >= 1");
}

Plane fit_plane(const std::vector<Point3>& points) {
  Plane plane;
  plane.centroid = centroid(points);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Vector3 d = p - plane.centroid;
    cov.noalias() += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  Vector3 n = solver.eigenvectors().col(0).normalized();
  Eigen::Index k = 0;
  n.cwiseAbs().maxCoeff(&k);
  if (n(k) < 0.0) n = -n;
  plane.normal = n;
  plane.offset = n.dot(plane.centroid);
  return plane;
}

namespace {

std::size_t count_inliers(const PointCloud& cloud, const std::vector<std::size_t>& candidates, const Vector3& n,
                          double offset, double threshold) {
  const auto m = static_cast<std::ptrdiff_t>(candidates.size());
  std::size_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    if (std::abs(n.dot(cloud.points[candidates[i]]) - offset) <= threshold) ++count;
  }
  return count;
}

std::size_t required_iterations(double inlier_ratio, double confidence, std::size_t cap) {
  const double w3 = inlier_ratio * inlier_ratio * inlier_ratio;
  if (w3 <= 0.0) return cap;
  if (w3 >= 1.0 || confidence >= 1.0) return confidence >= 1.0 ? cap : 1;
  const double k = std::log(1.0 - confidence) / std::log(1.0 - w3);
  if (!std::isfinite(k)) return cap;
  return std::min(cap, static_cast<std::size_t>(std::ceil(std::max(k, 1.0))));
}

}  // namespace

std::vector<Plane> ransac_plane(const PointCloud& cloud, const RansacParams& params) {
  params.validate();
  if (cloud.size() < 3) throw Error(ErrorCode::EmptyInput, "RANSAC needs at least 3 points");

  Point3 lo = cloud.points.front();
  Point3 hi = lo;
  for (const auto& p : cloud.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max((hi - lo).norm(), 1e-12);
  const double min_inliers = params.min_inlier_fraction * static_cast<double>(cloud.size());

  std::vector<std::size_t> remaining(cloud.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

  std::mt19937_64 rng(params.seed);
  std::vector<Plane> planes;
  while (planes.size() < params.plane_count && remaining.size() >= 3) {
    std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
    std::size_t best_count = 0;
    Vector3 best_normal = Vector3::UnitZ();
    double best_offset = 0.0;
    std::size_t needed = params.iterations;
    for (std::size_t it = 0; it < needed; ++it) {
      const std::size_t a = pick(rng);
      const std::size_t b = pick(rng);
      const std::size_t c = pick(rng);
      if (a == b || b == c || a == c) continue;
      const Point3& pa = cloud.points[remaining[a]];
      const Vector3 cross = (cloud.points[remaining[b]] - pa).cross(cloud.points[remaining[c]] - pa);
      if (cross.norm() <= 1e-12 * scale * scale) continue;  // collinear sample
      const Vector3 n = cross.normalized();
      const double offset = n.dot(pa);
      const std::size_t count = count_inliers(cloud, remaining, n, offset, params.distance_threshold);
      if (count > best_count) {
        best_count = count;
        best_normal = n;
        best_offset = offset;
        needed = required_iterations(static_cast<double>(count) / static_cast<double>(remaining.size()),
                                     params.confidence, params.iterations);
      }
    }
    if (best_count < 3 || static_cast<double>(best_count) < min_inliers) break;

    std::vector<Point3> support;
    for (auto idx : remaining) {
      if (std::abs(best_normal.dot(cloud.points[idx]) - best_offset) <= params.distance_threshold) {
        support.push_back(cloud.points[idx]);
      }
    }
    Plane plane = fit_plane(support);

    std::vector<std::size_t> keep;
    for (auto idx : remaining) {
      if (std::abs(plane.signed_distance(cloud.points[idx])) <= params.distance_threshold) {
        plane.inlier_indices.push_back(idx);
      } else {
        keep.push_back(idx);
      }
    }
    if (plane.inlier_indices.size() < 3 || static_cast<double>(plane.inlier_indices.size()) < min_inliers) break;
    std::vector<Point3> inlier_points;
    inlier_points.reserve(plane.inlier_indices.size());
    for (auto idx : plane.inlier_indices) inlier_points.push_back(cloud.points[idx]);
    plane.centroid = centroid(inlier_points);
    planes.push_back(std::move(plane));
    remaining = std::move(keep);
  }

  if (planes.empty()) {
    throw Error(ErrorCode::NoPlane, fmt::format("RANSAC found no plane with at least {:g}% inliers",
                                                params.min_inlier_fraction * 100.0));
  }
  std::stable_sort(planes.begin(), planes.end(), [](const Plane& a, const Plane& b) {
    return a.inlier_indices.size() > b.inlier_indices.size();
  });
  return planes;
}

}  // namespace thermalign
