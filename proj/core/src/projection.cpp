#include "thermalign/projection.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "thermalign/error.hpp"
#include "thermalign/normals.hpp"
#include "thermalign/parallel.hpp"

namespace thermalign {
namespace {

struct Projected {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  std::int64_t pixel = -1;  // -1 when not visible
};

std::vector<Projected> project_all(const PointCloud& cloud, const CameraModel& camera,
                                   const RigidTransform& world_to_camera) {
  std::vector<Projected> out(cloud.size());
  const auto n = static_cast<std::ptrdiff_t>(cloud.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Point3 xc = world_to_camera.apply(cloud.points[i]);
    const auto uv = project_point(camera, world_to_camera, cloud.points[i]);
    if (!uv) continue;
    Projected& p = out[i];
    p.u = uv->x();
    p.v = uv->y();
    p.depth = xc.z();
    p.pixel = static_cast<std::int64_t>(std::floor(p.v)) * camera.width + static_cast<std::int64_t>(std::floor(p.u));
  }
  return out;
}

}  // namespace

std::optional<Eigen::Vector2d> project_point(const CameraModel& camera, const RigidTransform& world_to_camera,
                                             const Point3& x) {
  const Point3 xc = world_to_camera.rotation * x + world_to_camera.translation;
  if (!(xc.z() > 0.0)) return std::nullopt;
  const double u = camera.aspect * camera.focal * xc.x() / xc.z() + camera.cx;
  const double v = camera.focal * xc.y() / xc.z() + camera.cy;
  if (!(u >= 0.0 && u < camera.width && v >= 0.0 && v < camera.height)) return std::nullopt;
  return Eigen::Vector2d(u, v);
}

PointCloud colorize_cloud(const PointCloud& cloud, const CameraModel& camera, std::span<const FramePose> frames,
                          const ColorizeParams& params) {
  if (frames.empty()) throw Error(ErrorCode::InvalidParameter, "colorize_cloud: no frames given");
  if (cloud.empty()) throw Error(ErrorCode::EmptyInput, "colorize_cloud: empty cloud");
  camera.validate();
  if (!(params.depth_tolerance >= 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "colorize_cloud: depth tolerance must be non-negative");
  }
  for (const auto& f : frames) {
    f.world_to_camera.validate();
    if (f.image.width != camera.width || f.image.height != camera.height) {
      throw Error(ErrorCode::InvalidParameter, "colorize_cloud: frame image size does not match the camera");
    }
  }

  NormalCloud normals;
  if (frames.size() > 1) {
    normals = estimate_normals(cloud, params.normal_radius, params.normal_min_neighbors);
  }

  const std::size_t n = cloud.size();
  std::vector<float> intensity(n, std::numeric_limits<float>::quiet_NaN());
  std::vector<double> best_cos(n, -1.0);
  std::vector<double> best_depth(n, std::numeric_limits<double>::infinity());
  const std::size_t pixel_count = static_cast<std::size_t>(camera.width) * static_cast<std::size_t>(camera.height);

  for (const auto& frame : frames) {
    const auto proj = project_all(cloud, camera, frame.world_to_camera);

    std::vector<double> zbuf;
    if (params.occlusion) {
      zbuf.assign(pixel_count, std::numeric_limits<double>::infinity());
      for (const auto& p : proj) {
        if (p.pixel >= 0) zbuf[p.pixel] = std::min(zbuf[p.pixel], p.depth);
      }
    }
    const Point3 center = frame.world_to_camera.inverse().translation;

    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const Projected& p = proj[i];
      if (p.pixel < 0) continue;
      if (params.occlusion && p.depth > zbuf[p.pixel] + params.depth_tolerance) continue;

      bool take = false;
      if (!normals.empty() && normals.is_valid(i)) {
        const Vector3 ray = (center - cloud.points[i]).normalized();
        const double c = std::abs(ray.dot(normals.normals[i]));
        if (c > best_cos[i]) {
          best_cos[i] = c;
          take = true;
        }
      } else if (p.depth < best_depth[i]) {
        best_depth[i] = p.depth;
        take = true;
      }
      if (!take) continue;
      const double value = params.sampling == IntensitySampling::Bilinear ? frame.image.bilinear(p.u, p.v)
                                                                           : frame.image.nearest(p.u, p.v);
      intensity[i] = static_cast<float>(std::clamp(value, 0.0, 1.0));
    }
  }

  PointCloud out = cloud;
  out.intensity = std::move(intensity);
  return out;
}

LabelImage back_project_labels(const PointCloud& cloud, const CameraModel& camera,
                               const RigidTransform& world_to_camera) {
  if (!cloud.has_labels()) throw Error(ErrorCode::InvalidParameter, "back_project_labels: cloud has no labels");
  camera.validate();
  world_to_camera.validate();

  const auto proj = project_all(cloud, camera, world_to_camera);
  LabelImage image;
  image.width = camera.width;
  image.height = camera.height;
  const std::size_t pixel_count = static_cast<std::size_t>(camera.width) * static_cast<std::size_t>(camera.height);
  image.pixels.assign(pixel_count, LabelImage::kBackground);
  std::vector<double> zbuf(pixel_count, std::numeric_limits<double>::infinity());
  // Ascending index order with a strict comparison keeps the lowest index on ties.
  for (std::size_t i = 0; i < proj.size(); ++i) {
    const auto& p = proj[i];
    if (p.pixel < 0 || !(p.depth < zbuf[p.pixel])) continue;
    zbuf[p.pixel] = p.depth;
    image.pixels[p.pixel] = static_cast<std::uint8_t>(cloud.labels[i]);
  }
  return image;
}

}  // namespace thermalign
