#include "thermalign/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "thermalign/error.hpp"
#include "thermalign/sampling.hpp"

namespace thermalign {
namespace {

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

struct Rect {
  double x0, z0, x1, z1;
  bool overlaps(const Rect& o) const { return x0 < o.x1 && o.x0 < x1 && z0 < o.z1 && o.z0 < z1; }
};

// Front-face rectangles at depth y, ordered counter-clockwise as seen from -y.
Ring front_rect(const Rect& r, double y) {
  return {{r.x0, y, r.z0}, {r.x1, y, r.z0}, {r.x1, y, r.z1}, {r.x0, y, r.z1}};
}

std::vector<Rect> window_rects(const SyntheticSceneSpec& s) {
  std::vector<Rect> out;
  for (int r = 0; r < s.window_rows; ++r) {
    const double zc = s.facade_height * (r + 0.5) / s.window_rows;
    for (int c = 0; c < s.window_cols; ++c) {
      const double xc = s.facade_width * (c + 1) / (s.window_cols + 1);
      out.push_back({xc - s.window_width / 2, zc - s.window_height / 2, xc + s.window_width / 2,
                     zc + s.window_height / 2});
    }
  }
  return out;
}

Rect door_rect(const SyntheticSceneSpec& s) {
  return {s.facade_width / 2 - s.door_width / 2, 0.0, s.facade_width / 2 + s.door_width / 2, s.door_height};
}

[[noreturn]] void spec_error(const std::string& what) { throw Error(ErrorCode::InvalidSpec, "synthetic scene: " + what); }

// World -> camera for a camera at `c` looking along +y, tilted up.
RigidTransform street_camera(const Point3& c, double tilt_rad) {
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, std::sin(tilt_rad), -std::cos(tilt_rad),
       0, std::cos(tilt_rad), std::sin(tilt_rad);
  RigidTransform t;
  t.rotation = r;
  t.translation = -r * c;
  return t;
}

struct SurfaceHit {
  PlaneFrame frame;
  Ring2 outer;
  std::vector<Ring2> holes;
};

}  // namespace

void SyntheticSceneSpec::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) spec_error(std::string(name) + " must be positive");
  };
  positive(facade_width, "facade_width");
  positive(facade_height, "facade_height");
  positive(side_depth, "side_depth");
  positive(roof_depth, "roof_depth");
  positive(ground_depth, "ground_depth");
  positive(scan_rate, "scan_rate");
  positive(camera_distance, "camera_distance");
  if (!(roof_rise >= 0.0)) spec_error("roof_rise must be non-negative");
  if (!(ground_margin >= 0.0)) spec_error("ground_margin must be non-negative");
  if (!(noise_sigma >= 0.0)) spec_error("noise_sigma must be non-negative");
  if (!(panel_recess >= 0.0)) spec_error("panel_recess must be non-negative");
  if (!(crop_fraction >= 0.0 && crop_fraction < 1.0)) spec_error("crop_fraction must lie in [0, 1)");
  if (window_rows < 0 || window_cols < 0) spec_error("window grid must be non-negative");
  if (frame_count < 0) spec_error("frame_count must be non-negative");
  if (!(max_rotation_degrees >= 0.0 && max_rotation_degrees <= 180.0)) spec_error("max_rotation_degrees out of range");
  if (!(max_translation >= 0.0)) spec_error("max_translation must be non-negative");
  try {
    camera.validate();
  } catch (const Error& e) {
    spec_error(e.what());
  }
  if (gt_transform && !gt_transform->is_valid(1e-6)) spec_error("gt_transform is not a rigid motion");

  std::vector<Rect> openings;
  if (window_rows > 0 && window_cols > 0) {
    positive(window_width, "window_width");
    positive(window_height, "window_height");
    openings = window_rects(*this);
  }
  if (door) {
    positive(door_width, "door_width");
    positive(door_height, "door_height");
    openings.push_back(door_rect(*this));
  }
  for (std::size_t i = 0; i < openings.size(); ++i) {
    const Rect& r = openings[i];
    if (r.x0 <= 0.0 || r.x1 >= facade_width || r.z0 < 0.0 || r.z1 >= facade_height) {
      spec_error("window/door layout exceeds the facade");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (r.overlaps(openings[j])) spec_error("window/door openings overlap");
    }
  }
}

BuildingModel synthetic_facade_model(const SyntheticSceneSpec& s) {
  s.validate();
  const double w = s.facade_width;
  const double h = s.facade_height;
  BuildingModel model;

  SemanticSurface front;
  front.label = SemanticClass::Wall;
  front.id = "wall_front";
  if (s.door) {
    // The door touches the ground, so it is cut out of the outer ring.
    const Rect d = door_rect(s);
    front.outer = {{0, 0, 0}, {d.x0, 0, 0}, {d.x0, 0, d.z1}, {d.x1, 0, d.z1}, {d.x1, 0, 0}, {w, 0, 0}, {w, 0, h}, {0, 0, h}};
  } else {
    front.outer = front_rect({0, 0, w, h}, 0.0);
  }
  std::vector<Rect> windows;
  if (s.window_rows > 0 && s.window_cols > 0) windows = window_rects(s);
  for (const auto& r : windows) front.holes.push_back(front_rect(r, 0.0));
  model.surfaces.push_back(front);

  for (std::size_t k = 0; k < windows.size(); ++k) {
    SemanticSurface pane;
    pane.label = SemanticClass::Window;
    pane.id = "window_" + std::to_string(k);
    pane.outer = front_rect(windows[k], s.panel_recess);
    model.surfaces.push_back(pane);
  }
  if (s.door) {
    SemanticSurface d;
    d.label = SemanticClass::Door;
    d.id = "door_0";
    d.outer = front_rect(door_rect(s), s.panel_recess);
    model.surfaces.push_back(d);
  }

  SemanticSurface side;
  side.label = SemanticClass::Wall;
  side.id = "wall_left";
  side.outer = {{0, 0, 0}, {0, 0, h}, {0, s.side_depth, h}, {0, s.side_depth, 0}};
  model.surfaces.push_back(side);

  SemanticSurface roof;
  roof.label = SemanticClass::Roof;
  roof.id = "roof_0";
  roof.outer = {{0, 0, h}, {w, 0, h}, {w, s.roof_depth, h + s.roof_rise}, {0, s.roof_depth, h + s.roof_rise}};
  model.surfaces.push_back(roof);

  SemanticSurface ground;
  ground.label = SemanticClass::Ground;
  ground.id = "ground_0";
  const double g0 = -s.ground_margin;
  const double g1 = w + s.ground_margin;
  ground.outer = {{g0, -s.ground_depth, 0}, {g1, -s.ground_depth, 0}, {g1, 0, 0}, {g0, 0, 0}};
  model.surfaces.push_back(ground);

  model.validate();
  return model;
}

RigidTransform random_rigid_transform(std::mt19937_64& rng, double max_rotation_degrees, double max_translation) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector3 axis;
  do {
    axis = Vector3(normal(rng), normal(rng), normal(rng));
  } while (axis.norm() < 1e-9);
  const double angle = deg2rad(max_rotation_degrees) * unit(rng);
  Vector3 dir;
  do {
    dir = Vector3(normal(rng), normal(rng), normal(rng));
  } while (dir.norm() < 1e-9);
  const double radius = max_translation * std::cbrt(unit(rng));
  return RigidTransform::from_axis_angle(axis, angle, radius * dir.normalized());
}

double synthetic_intensity(SemanticClass label, const Point3& p, const SyntheticSceneSpec& spec) {
  const double zr = std::clamp(p.z() / spec.facade_height, 0.0, 1.5);
  double v = 0.0;
  switch (label) {
    case SemanticClass::Wall: v = 0.40 + 0.10 * zr + 0.02 * std::sin(0.8 * p.x()); break;
    case SemanticClass::Window: v = 0.70 + 0.05 * zr; break;
    case SemanticClass::Door: v = 0.60; break;
    case SemanticClass::Roof: v = 0.30 + 0.02 * std::cos(0.5 * p.x()); break;
    case SemanticClass::Ground: v = 0.20 + 0.01 * p.y(); break;
    case SemanticClass::Unlabeled: v = 0.05; break;
  }
  return std::clamp(v, 0.0, 1.0);
}

Image render_thermal_frame(const BuildingModel& model, const SyntheticSceneSpec& spec,
                           const RigidTransform& world_to_camera) {
  const CameraModel& cam = spec.camera;
  std::vector<SurfaceHit> surfaces;
  surfaces.reserve(model.surfaces.size());
  for (const auto& s : model.surfaces) {
    SurfaceHit hit;
    hit.frame = surface_plane_frame(s);
    for (const auto& p : s.outer) hit.outer.push_back(hit.frame.to_uv(p));
    for (const auto& ring : s.holes) {
      Ring2& r = hit.holes.emplace_back();
      for (const auto& p : ring) r.push_back(hit.frame.to_uv(p));
    }
    surfaces.push_back(std::move(hit));
  }

  const RigidTransform camera_to_world = world_to_camera.inverse();
  const Point3 origin = camera_to_world.translation;
  Image img(cam.width, cam.height, static_cast<float>(synthetic_intensity(SemanticClass::Unlabeled, origin, spec)));
  for (int row = 0; row < cam.height; ++row) {
    for (int col = 0; col < cam.width; ++col) {
      const Vector3 dc((col + 0.5 - cam.cx) / (cam.aspect * cam.focal), (row + 0.5 - cam.cy) / cam.focal, 1.0);
      const Vector3 dir = camera_to_world.rotation * dc;
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_surface = surfaces.size();
      for (std::size_t k = 0; k < surfaces.size(); ++k) {
        const auto& f = surfaces[k].frame;
        const double denom = dir.dot(f.normal);
        if (std::abs(denom) < 1e-12) continue;
        const double t = (f.origin - origin).dot(f.normal) / denom;
        if (!(t > 0.0) || t >= best) continue;
        if (!point_in_polygon(f.to_uv(origin + t * dir), surfaces[k].outer, surfaces[k].holes)) continue;
        best = t;
        best_surface = k;
      }
      if (best_surface < surfaces.size()) {
        img.at(col, row) = static_cast<float>(
            synthetic_intensity(model.surfaces[best_surface].label, origin + best * dir, spec));
      }
    }
  }
  return img;
}

SyntheticScene generate_scene(const SyntheticSceneSpec& spec) {
  SyntheticScene scene;
  scene.model = synthetic_facade_model(spec);
  std::mt19937_64 rng(spec.seed);
  scene.gt_transform = spec.gt_transform
                           ? RigidTransform{nearest_rotation(spec.gt_transform->rotation), spec.gt_transform->translation}
                           : random_rigid_transform(rng, spec.max_rotation_degrees, spec.max_translation);
  const RigidTransform model_to_scan = scene.gt_transform.inverse();

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  // Model-frame samples of every surface with a random grid anchor.
  PointCloud truth;
  for (const auto& s : scene.model.surfaces) truth.intern_id(s.id);
  for (std::size_t k = 0; k < scene.model.surfaces.size(); ++k) {
    const Eigen::Vector2d offset(unit(rng) * spec.scan_rate, unit(rng) * spec.scan_rate);
    const PointCloud part = sample_surface(scene.model.surfaces[k], spec.scan_rate, offset);
    for (const auto& p : part.points) {
      truth.points.push_back(p);
      truth.labels.push_back(scene.model.surfaces[k].label);
      truth.ids.push_back(static_cast<std::uint32_t>(k));
    }
  }
  if (truth.empty()) throw Error(ErrorCode::EmptyOutput, "synthetic scene: scan sampling produced no points");

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  for (const auto& p : truth.points) {
    x_min = std::min(x_min, p.x());
    x_max = std::max(x_max, p.x());
  }
  const double x_keep = x_min + (1.0 - spec.crop_fraction) * (x_max - x_min);

  PointCloud kept;
  kept.id_names = truth.id_names;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (spec.crop_fraction > 0.0 && truth.points[i].x() > x_keep) continue;
    Point3 p = truth.points[i];
    if (spec.noise_sigma > 0.0) p += spec.noise_sigma * Vector3(noise(rng), noise(rng), noise(rng));
    kept.points.push_back(p);
    kept.labels.push_back(truth.labels[i]);
    kept.ids.push_back(truth.ids[i]);
  }

  // Street furniture: small boxes well in front of the ground apron.
  const double street_y0 = -spec.ground_depth - 6.0;
  const double street_y1 = -spec.ground_depth - 2.5;
  const double box_x_hi = std::max(0.0, x_keep);
  for (std::size_t i = 0; i < spec.clutter_points; ++i) {
    const Point3 p(unit(rng) * box_x_hi, street_y0 + unit(rng) * (street_y1 - street_y0), unit(rng) * 1.5);
    kept.points.push_back(p);
    kept.labels.push_back(SemanticClass::Unlabeled);
    kept.ids.push_back(kNoId);
  }

  scene.scan_truth = apply_transform(kept, model_to_scan);
  scene.scan.points = scene.scan_truth.points;

  scene.camera = spec.camera;
  const double tilt = deg2rad(spec.camera_tilt_degrees);
  const double span = (1.0 - spec.crop_fraction) * spec.facade_width;
  for (int k = 0; k < spec.frame_count; ++k) {
    const Point3 c(span * (k + 0.5) / spec.frame_count, -spec.camera_distance, spec.camera_height);
    const RigidTransform model_pose = street_camera(c, tilt);
    FramePose frame;
    frame.image = render_thermal_frame(scene.model, spec, model_pose);
    frame.world_to_camera = compose(model_pose, scene.gt_transform);
    scene.frames.push_back(std::move(frame));
  }
  scene.scanner_model = spec.scanner_position;
  scene.scanner_scan = model_to_scan.apply(spec.scanner_position);
  return scene;
}

}  // namespace thermalign
