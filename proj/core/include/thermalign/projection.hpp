#pragma once

#include <optional>
#include <span>

#include <Eigen/Core>

#include "thermalign/camera.hpp"
#include "thermalign/geometry.hpp"
#include "thermalign/transform.hpp"

namespace thermalign {

/// Collinearity projection u = K [R|T] x. Absent when the point is at or
/// behind the camera or lands outside [0, width) x [0, height).
std::optional<Eigen::Vector2d> project_point(const CameraModel& camera, const RigidTransform& world_to_camera,
                                             const Point3& x);

inline std::optional<Eigen::Vector2d> project_point(const CameraModel& camera, const FramePose& pose,
                                                    const Point3& x) {
  return project_point(camera, pose.world_to_camera, x);
}

enum class IntensitySampling { Bilinear, Nearest };

struct ColorizeParams {
  /// Pixel z-buffer: points deeper than the per-pixel minimum depth plus
  /// `depth_tolerance` are treated as occluded in that frame.
  bool occlusion = true;
  double depth_tolerance = 0.1;
  IntensitySampling sampling = IntensitySampling::Bilinear;
  /// Neighbourhood used to estimate normals for choosing between frames.
  double normal_radius = 0.3;
  int normal_min_neighbors = 5;
};

/// Samples thermal intensities for every point visible in at least one
/// frame. When several frames see a point, the frame viewing it closest to
/// its normal wins; points without a usable normal take the frame with the
/// smallest depth. Points never visible get NaN intensity. Positions,
/// labels and ids are copied unchanged.
PointCloud colorize_cloud(const PointCloud& cloud, const CameraModel& camera, std::span<const FramePose> frames,
                          const ColorizeParams& params = {});

/// Z-buffered label rendering: each pixel takes the label of the nearest
/// point projecting into it (ties to the lowest index).
LabelImage back_project_labels(const PointCloud& cloud, const CameraModel& camera,
                               const RigidTransform& world_to_camera);

inline LabelImage back_project_labels(const PointCloud& cloud, const CameraModel& camera, const FramePose& pose) {
  return back_project_labels(cloud, camera, pose.world_to_camera);
}

}  // namespace thermalign
