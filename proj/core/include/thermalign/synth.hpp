#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "thermalign/building_model.hpp"
#include "thermalign/camera.hpp"
#include "thermalign/geometry.hpp"
#include "thermalign/transform.hpp"

namespace thermalign {

/// Layout of the synthetic facade scene. Model frame: the front wall lies in
/// y = 0 facing -y with its lower-left corner at the origin, z is up.
struct SyntheticSceneSpec {
  double facade_width = 20.0;
  double facade_height = 10.0;
  /// Depth of the left side wall (x = 0) and of the roof strip.
  double side_depth = 8.0;
  double roof_depth = 4.0;
  double roof_rise = 2.0;
  /// Ground apron in front of the facade.
  double ground_margin = 3.0;
  double ground_depth = 6.0;

  int window_rows = 2;
  int window_cols = 4;
  double window_width = 1.4;
  double window_height = 1.8;
  /// Window and door panels sit this far behind the wall plane.
  double panel_recess = 0.15;
  bool door = true;
  double door_width = 1.6;
  double door_height = 2.4;

  double scan_rate = 0.05;
  double noise_sigma = 0.02;
  /// Fraction of the facade extent (along x) removed from the scan.
  double crop_fraction = 0.3;
  std::size_t clutter_points = 500;

  /// Maps scan coordinates into the model frame. Drawn from `seed` within
  /// the limits below when absent.
  std::optional<RigidTransform> gt_transform;
  double max_rotation_degrees = 30.0;
  double max_translation = 10.0;
  std::uint64_t seed = 42;

  CameraModel camera{200.0, 1.0, 160.0, 128.0, 320, 256};
  int frame_count = 3;
  double camera_distance = 15.0;
  double camera_height = 1.6;
  double camera_tilt_degrees = 15.0;
  /// Street-side scanner position in the model frame.
  Point3 scanner_position{7.0, -10.0, 2.0};

  /// Throws Error(InvalidSpec) for non-positive sizes or an infeasible
  /// window/door layout.
  void validate() const;
};

struct SyntheticScene {
  BuildingModel model;
  /// Simulated laser scan in its own frame, positions only.
  PointCloud scan;
  /// The same points with the label and id of the generating surface;
  /// clutter is Unlabeled without id.
  PointCloud scan_truth;
  /// Scan frame -> model frame.
  RigidTransform gt_transform;
  CameraModel camera;
  /// Thermal frames posed in the scan frame.
  std::vector<FramePose> frames;
  Point3 scanner_model = Point3::Zero();
  Point3 scanner_scan = Point3::Zero();
};

BuildingModel synthetic_facade_model(const SyntheticSceneSpec& spec);

/// Rotation about a uniformly random axis with angle uniform in
/// [0, max_rotation_degrees], translation uniform in a ball of radius
/// max_translation.
RigidTransform random_rigid_transform(std::mt19937_64& rng, double max_rotation_degrees, double max_translation);

/// Analytic thermal field of the synthetic scene, in [0, 1].
double synthetic_intensity(SemanticClass label, const Point3& model_point, const SyntheticSceneSpec& spec);

/// Renders one frame by ray casting the model; `world_to_camera` is in the
/// model frame.
Image render_thermal_frame(const BuildingModel& model, const SyntheticSceneSpec& spec,
                           const RigidTransform& world_to_camera);

SyntheticScene generate_scene(const SyntheticSceneSpec& spec);

}  // namespace thermalign
