#include "thermalign/io/json_io.hpp"

#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "json.hpp"
#include "thermalign/io/file_util.hpp"
#include "thermalign/io/pgm.hpp"
#include "thermalign/io/ply.hpp"

namespace thermalign::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorCode::DataFormat, what); }

json parse_text(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    format_error(std::string(what) + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_double(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) format_error(std::string("missing field '") + key + "'");
  if (it->is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!it->is_number()) format_error(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

// Overwrites `out` when `key` is present; unknown keys are rejected.
class Reader {
 public:
  Reader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) format_error(context_ + " must be a JSON object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) format_error(context_ + ": unknown field '" + key + "'");
    }
  }

  template <typename T>
  void opt(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      format_error(context_ + "." + key + ": " + e.what());
    }
  }

  void opt_point(const char* key, Point3& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!it->is_array() || it->size() != 3) format_error(context_ + "." + key + " must be [x, y, z]");
    for (int k = 0; k < 3; ++k) out[k] = (*it)[k].get<double>();
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

 private:
  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

json point_json(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

Point3 point_from(const json& j) {
  if (!j.is_array() || j.size() != 3) format_error("a point must be [x, y, z]");
  Point3 p;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) format_error("point coordinates must be numbers");
    p[k] = j[k].get<double>();
  }
  return p;
}

json transform_json(const RigidTransform& t) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot.push_back(t.rotation(r, c));
  }
  return json{{"rotation", rot}, {"translation", point_json(t.translation)}};
}

RigidTransform transform_from(const json& j) {
  if (!j.is_object()) format_error("transform must be an object");
  const auto rot = j.find("rotation");
  const auto tr = j.find("translation");
  if (rot == j.end() || !rot->is_array() || rot->size() != 9) format_error("transform.rotation must hold 9 numbers");
  if (tr == j.end()) format_error("transform.translation missing");
  RigidTransform t;
  for (int k = 0; k < 9; ++k) {
    if (!(*rot)[k].is_number()) format_error("transform.rotation must hold 9 numbers");
    t.rotation(k / 3, k % 3) = (*rot)[k].get<double>();
  }
  t.translation = point_from(*tr);
  if (!t.rotation.allFinite() || !t.translation.allFinite()) format_error("transform has non-finite entries");
  if (!t.is_valid(1e-6)) throw Error(ErrorCode::InvalidTransform, "transform rotation is not orthonormal");
  // Rotations written by us are already orthonormal; keep them bit-exact.
  if (!t.is_valid()) t.rotation = nearest_rotation(t.rotation);
  return t;
}

json ring_json(const Ring& ring) {
  json out = json::array();
  for (const auto& p : ring) out.push_back(point_json(p));
  return out;
}

Ring ring_from(const json& j) {
  if (!j.is_array()) format_error("a ring must be a list of points");
  Ring ring;
  for (const auto& p : j) ring.push_back(point_from(p));
  return ring;
}

json camera_json(const CameraModel& c) {
  return json{{"focal", c.focal}, {"aspect", c.aspect}, {"cx", c.cx},
              {"cy", c.cy},       {"width", c.width},   {"height", c.height}};
}

CameraModel camera_from(const json& j) {
  CameraModel c;
  Reader r(j, "camera");
  r.opt("focal", c.focal);
  r.opt("aspect", c.aspect);
  r.opt("cx", c.cx);
  r.opt("cy", c.cy);
  r.opt("width", c.width);
  r.opt("height", c.height);
  return c;
}

// ---- parameter blocks ----

json fgr_json(const FgrParams& p) {
  json z = p.z_range ? json::array({p.z_range->first, p.z_range->second}) : json(nullptr);
  return json{{"voxel_size", p.voxel_size},
              {"normal_radius", p.normal_radius},
              {"feature_radius", p.feature_radius},
              {"normal_min_neighbors", p.normal_min_neighbors},
              {"tuple_scale", p.tuple_scale},
              {"max_tuples", p.max_tuples},
              {"max_iterations", p.max_iterations},
              {"division_factor", p.division_factor},
              {"max_correspondence_distance", p.max_correspondence_distance},
              {"seed", p.seed},
              {"source_viewpoint", point_json(p.source_viewpoint)},
              {"target_viewpoint", point_json(p.target_viewpoint)},
              {"z_range", z},
              {"evaluation_threshold", p.evaluation_threshold}};
}

void fgr_from(const json& j, FgrParams& p) {
  Reader r(j, "fgr");
  r.opt("voxel_size", p.voxel_size);
  r.opt("normal_radius", p.normal_radius);
  r.opt("feature_radius", p.feature_radius);
  r.opt("normal_min_neighbors", p.normal_min_neighbors);
  r.opt("tuple_scale", p.tuple_scale);
  r.opt("max_tuples", p.max_tuples);
  r.opt("max_iterations", p.max_iterations);
  r.opt("division_factor", p.division_factor);
  r.opt("max_correspondence_distance", p.max_correspondence_distance);
  r.opt("seed", p.seed);
  r.opt_point("source_viewpoint", p.source_viewpoint);
  r.opt_point("target_viewpoint", p.target_viewpoint);
  if (const json* z = r.child("z_range")) {
    if (z->is_null()) {
      p.z_range.reset();
    } else if (z->is_array() && z->size() == 2) {
      p.z_range = std::make_pair((*z)[0].get<double>(), (*z)[1].get<double>());
    } else {
      format_error("fgr.z_range must be null or [min, max]");
    }
  }
  r.opt("evaluation_threshold", p.evaluation_threshold);
}

json ransac_json(const RansacParams& p) {
  return json{{"distance_threshold", p.distance_threshold},
              {"iterations", p.iterations},
              {"confidence", p.confidence},
              {"min_inlier_fraction", p.min_inlier_fraction},
              {"plane_count", p.plane_count},
              {"seed", p.seed}};
}

void ransac_from(const json& j, RansacParams& p) {
  Reader r(j, "ransac");
  r.opt("distance_threshold", p.distance_threshold);
  r.opt("iterations", p.iterations);
  r.opt("confidence", p.confidence);
  r.opt("min_inlier_fraction", p.min_inlier_fraction);
  r.opt("plane_count", p.plane_count);
  r.opt("seed", p.seed);
}

json icp_json(const IcpParams& p) {
  return json{{"max_correspondence_distance", p.max_correspondence_distance},
              {"rmse_threshold", p.rmse_threshold},
              {"max_iterations", p.max_iterations},
              {"normal_gate", p.normal_gate},
              {"normal_gate_degrees", p.normal_gate_degrees},
              {"normal_gate_radius", p.normal_gate_radius}};
}

void icp_from(const json& j, IcpParams& p) {
  Reader r(j, "icp");
  r.opt("max_correspondence_distance", p.max_correspondence_distance);
  r.opt("rmse_threshold", p.rmse_threshold);
  r.opt("max_iterations", p.max_iterations);
  r.opt("normal_gate", p.normal_gate);
  r.opt("normal_gate_degrees", p.normal_gate_degrees);
  r.opt("normal_gate_radius", p.normal_gate_radius);
}

json rectify_json(const RectifyParams& p) {
  return json{{"ground_percentile", p.ground_percentile},
              {"horizontal_tolerance_degrees", p.horizontal_tolerance_degrees},
              {"max_plane_disagreement_degrees", p.max_plane_disagreement_degrees}};
}

void rectify_from(const json& j, RectifyParams& p) {
  Reader r(j, "rectify");
  r.opt("ground_percentile", p.ground_percentile);
  r.opt("horizontal_tolerance_degrees", p.horizontal_tolerance_degrees);
  r.opt("max_plane_disagreement_degrees", p.max_plane_disagreement_degrees);
}

json fine_json(const FineRegistrationParams& p) {
  return json{{"ransac", ransac_json(p.ransac)},
              {"icp", icp_json(p.icp)},
              {"rectify", rectify_json(p.rectify)},
              {"normal_radius", p.normal_radius},
              {"normal_min_neighbors", p.normal_min_neighbors}};
}

void fine_from(const json& j, FineRegistrationParams& p) {
  Reader r(j, "fine");
  if (const json* c = r.child("ransac")) ransac_from(*c, p.ransac);
  if (const json* c = r.child("icp")) icp_from(*c, p.icp);
  if (const json* c = r.child("rectify")) rectify_from(*c, p.rectify);
  r.opt("normal_radius", p.normal_radius);
  r.opt("normal_min_neighbors", p.normal_min_neighbors);
}

json registration_params_json(const RegistrationParams& p) {
  return json{{"fgr", fgr_json(p.fgr)}, {"fine", fine_json(p.fine)}, {"evaluation_threshold", p.evaluation_threshold}};
}

void registration_params_from(const json& j, RegistrationParams& p) {
  Reader r(j, "registration");
  if (const json* c = r.child("fgr")) fgr_from(*c, p.fgr);
  if (const json* c = r.child("fine")) fine_from(*c, p.fine);
  r.opt("evaluation_threshold", p.evaluation_threshold);
}

json colorize_json(const ColorizeParams& p) {
  return json{{"occlusion", p.occlusion},
              {"depth_tolerance", p.depth_tolerance},
              {"sampling", p.sampling == IntensitySampling::Bilinear ? "bilinear" : "nearest"},
              {"normal_radius", p.normal_radius},
              {"normal_min_neighbors", p.normal_min_neighbors}};
}

void colorize_from(const json& j, ColorizeParams& p) {
  Reader r(j, "colorize");
  r.opt("occlusion", p.occlusion);
  r.opt("depth_tolerance", p.depth_tolerance);
  std::string sampling = p.sampling == IntensitySampling::Bilinear ? "bilinear" : "nearest";
  r.opt("sampling", sampling);
  if (sampling == "bilinear") {
    p.sampling = IntensitySampling::Bilinear;
  } else if (sampling == "nearest") {
    p.sampling = IntensitySampling::Nearest;
  } else {
    format_error("colorize.sampling must be 'bilinear' or 'nearest'");
  }
  r.opt("normal_radius", p.normal_radius);
  r.opt("normal_min_neighbors", p.normal_min_neighbors);
}

json transfer_json(const TransferParams& p) {
  return json{{"max_distance", p.max_distance}, {"georeference", p.georeference}};
}

void transfer_from(const json& j, TransferParams& p) {
  Reader r(j, "transfer");
  r.opt("max_distance", p.max_distance);
  r.opt("georeference", p.georeference);
}

json report_json(const RegistrationReport& rep, const RegistrationMetrics& m) {
  json trace = json::array();
  for (double v : rep.trace) trace.push_back(number_or_null(v));
  return json{{"transform", transform_json(rep.transform)},
              {"fitness", rep.fitness},
              {"rmse", number_or_null(rep.rmse)},
              {"inlier_count", m.inlier_count},
              {"iterations", rep.iterations},
              {"converged", rep.converged},
              {"trace", trace}};
}

void report_from(const json& j, RegistrationReport& rep, RegistrationMetrics& m) {
  if (!j.is_object()) format_error("stage report must be an object");
  try {
    rep.transform = transform_from(j.at("transform"));
    rep.fitness = get_double(j, "fitness");
    rep.rmse = get_double(j, "rmse");
    rep.iterations = j.at("iterations").get<std::size_t>();
    rep.converged = j.at("converged").get<bool>();
    rep.trace.clear();
    for (const auto& v : j.at("trace")) {
      rep.trace.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
    }
    m.fitness = rep.fitness;
    m.rmse = rep.rmse;
    m.inlier_count = j.at("inlier_count").get<std::size_t>();
  } catch (const json::exception& e) {
    format_error(std::string("stage report: ") + e.what());
  }
}

json config_json(const PipelineConfig& c) {
  return json{{"model", c.model.generic_string()},
              {"scan", c.scan.generic_string()},
              {"camera", c.camera.generic_string()},
              {"poses", c.poses.generic_string()},
              {"output_dir", c.output_dir.generic_string()},
              {"seed", c.seed},
              {"sampling", json{{"rate", c.sampling.rate}}},
              {"colorize", colorize_json(c.colorize)},
              {"registration", registration_params_json(c.registration)},
              {"transfer", transfer_json(c.transfer)}};
}

json spec_json(const SyntheticSceneSpec& s) {
  return json{{"facade_width", s.facade_width},
              {"facade_height", s.facade_height},
              {"side_depth", s.side_depth},
              {"roof_depth", s.roof_depth},
              {"roof_rise", s.roof_rise},
              {"ground_margin", s.ground_margin},
              {"ground_depth", s.ground_depth},
              {"window_rows", s.window_rows},
              {"window_cols", s.window_cols},
              {"window_width", s.window_width},
              {"window_height", s.window_height},
              {"panel_recess", s.panel_recess},
              {"door", s.door},
              {"door_width", s.door_width},
              {"door_height", s.door_height},
              {"scan_rate", s.scan_rate},
              {"noise_sigma", s.noise_sigma},
              {"crop_fraction", s.crop_fraction},
              {"clutter_points", s.clutter_points},
              {"gt_transform", s.gt_transform ? transform_json(*s.gt_transform) : json(nullptr)},
              {"max_rotation_degrees", s.max_rotation_degrees},
              {"max_translation", s.max_translation},
              {"seed", s.seed},
              {"camera", camera_json(s.camera)},
              {"frame_count", s.frame_count},
              {"camera_distance", s.camera_distance},
              {"camera_height", s.camera_height},
              {"camera_tilt_degrees", s.camera_tilt_degrees},
              {"scanner_position", point_json(s.scanner_position)}};
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

fs::path absolute_path(const fs::path& p) {
  if (p.empty()) return p;
  std::error_code ec;
  const fs::path a = fs::absolute(p, ec);
  return ec ? p : a.lexically_normal();
}

template <typename T, typename F>
T read_with(const fs::path& path, F parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace

BuildingModel parse_model(std::string_view text) {
  const json j = parse_text(text, "model");
  if (!j.is_object() || !j.contains("surfaces") || !j["surfaces"].is_array()) {
    format_error("model must be an object with a 'surfaces' list");
  }
  BuildingModel model;
  for (const auto& s : j["surfaces"]) {
    if (!s.is_object()) format_error("surface must be an object");
    SemanticSurface surface;
    try {
      const auto label_name = s.at("label").get<std::string>();
      const auto label = parse_semantic_class(label_name);
      if (!label) format_error("unknown surface label '" + label_name + "'");
      surface.label = *label;
      surface.id = s.at("id").get<std::string>();
      surface.outer = ring_from(s.at("outer"));
      if (s.contains("holes")) {
        for (const auto& h : s["holes"]) surface.holes.push_back(ring_from(h));
      }
    } catch (const json::exception& e) {
      format_error(std::string("surface: ") + e.what());
    }
    model.surfaces.push_back(std::move(surface));
  }
  try {
    model.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateSurface) throw;
    throw Error(ErrorCode::DataFormat, std::string("invalid model: ") + e.what());
  }
  return model;
}

std::string model_to_json(const BuildingModel& model) {
  json surfaces = json::array();
  for (const auto& s : model.surfaces) {
    json holes = json::array();
    for (const auto& h : s.holes) holes.push_back(ring_json(h));
    surfaces.push_back(json{{"label", std::string(to_string(s.label))},
                            {"id", s.id},
                            {"outer", ring_json(s.outer)},
                            {"holes", holes}});
  }
  return dump(json{{"surfaces", surfaces}});
}

BuildingModel read_model(const fs::path& path) { return read_with<BuildingModel>(path, parse_model); }
void write_model(const fs::path& path, const BuildingModel& model) { write_file_atomic(path, model_to_json(model)); }

RigidTransform parse_transform(std::string_view text) { return transform_from(parse_text(text, "transform")); }
std::string transform_to_json(const RigidTransform& t) { return dump(transform_json(t)); }
RigidTransform read_transform(const fs::path& path) { return read_with<RigidTransform>(path, parse_transform); }
void write_transform(const fs::path& path, const RigidTransform& t) { write_file_atomic(path, transform_to_json(t)); }

CameraModel parse_camera(std::string_view text) {
  CameraModel c = camera_from(parse_text(text, "camera"));
  try {
    c.validate();
  } catch (const Error& e) {
    format_error(e.what());
  }
  return c;
}
std::string camera_to_json(const CameraModel& camera) { return dump(camera_json(camera)); }
CameraModel read_camera(const fs::path& path) { return read_with<CameraModel>(path, parse_camera); }
void write_camera(const fs::path& path, const CameraModel& camera) { write_file_atomic(path, camera_to_json(camera)); }

std::vector<PoseEntry> parse_poses(std::string_view text) {
  const json j = parse_text(text, "poses");
  if (!j.is_array()) format_error("pose file must be a JSON list");
  std::vector<PoseEntry> out;
  for (const auto& f : j) {
    if (!f.is_object() || !f.contains("image") || !f["image"].is_string()) {
      format_error("pose entry needs an 'image' path");
    }
    out.push_back({f["image"].get<std::string>(), transform_from(f)});
  }
  return out;
}

std::string poses_to_json(const std::vector<PoseEntry>& poses) {
  json out = json::array();
  for (const auto& p : poses) {
    json entry = json{{"image", p.image}};
    const json t = transform_json(p.world_to_camera);
    entry["rotation"] = t["rotation"];
    entry["translation"] = t["translation"];
    out.push_back(entry);
  }
  return dump(out);
}

std::vector<FramePose> read_frames(const fs::path& pose_file, const CameraModel& camera) {
  const auto entries = read_with<std::vector<PoseEntry>>(pose_file, parse_poses);
  if (entries.empty()) throw Error(ErrorCode::InvalidParameter, pose_file.string() + ": no frames");
  std::vector<FramePose> frames;
  for (const auto& e : entries) {
    FramePose f;
    f.world_to_camera = e.world_to_camera;
    f.image = read_pgm(resolve(pose_file.parent_path(), e.image));
    if (f.image.width != camera.width || f.image.height != camera.height) {
      throw Error(ErrorCode::DataFormat, e.image + ": image size does not match the camera");
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::string registration_to_json(const RegistrationDocument& doc) {
  const auto& r = doc.result;
  json j;
  j["transform"] = transform_json(r.fine.transform);
  j["fitness"] = r.fine.fitness;
  j["rmse"] = number_or_null(r.fine.rmse);
  j["iterations"] = r.fine.iterations;
  j["converged"] = r.fine.converged;
  j["coarse"] = report_json(r.coarse, r.coarse_metrics);
  j["fine"] = report_json(r.fine, r.fine_metrics);
  j["rectification"] = json{{"skipped", r.rectification_skipped}, {"warning", r.rectification_warning}};
  j["evaluation_threshold"] = doc.params.evaluation_threshold;
  j["seed"] = doc.seed;
  j["params"] = registration_params_json(doc.params);
  return dump(j);
}

RegistrationDocument parse_registration(std::string_view text) {
  const json j = parse_text(text, "registration report");
  if (!j.is_object()) format_error("registration report must be an object");
  RegistrationDocument doc;
  try {
    report_from(j.at("coarse"), doc.result.coarse, doc.result.coarse_metrics);
    report_from(j.at("fine"), doc.result.fine, doc.result.fine_metrics);
    doc.result.rectification_skipped = j.at("rectification").at("skipped").get<bool>();
    doc.result.rectification_warning = j.at("rectification").at("warning").get<std::string>();
    doc.seed = j.at("seed").get<std::uint64_t>();
    registration_params_from(j.at("params"), doc.params);
  } catch (const json::exception& e) {
    format_error(std::string("registration report: ") + e.what());
  }
  return doc;
}

std::string statistics_to_csv(const ClassStatistics& stats) {
  std::string out = "class,count,mean_intensity,std_intensity\n";
  for (std::size_t k = 0; k < kSemanticClassCount; ++k) {
    const auto& c = stats.classes[k];
    const auto name = to_string(static_cast<SemanticClass>(k));
    if (c.intensity_count > 0) {
      out += fmt::format("{},{},{},{}\n", name, c.count, c.mean, c.stddev);
    } else {
      out += fmt::format("{},{},,\n", name, c.count);
    }
  }
  return out;
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  json j = parse_text(text, "config");
  if (j.is_object() && j.contains("config") && j.contains("metrics")) j = j["config"];
  PipelineConfig c;
  {
    Reader r(j, "config");
    std::string model, scan, camera, poses, output_dir;
    r.opt("model", model);
    r.opt("scan", scan);
    r.opt("camera", camera);
    r.opt("poses", poses);
    r.opt("output_dir", output_dir);
    c.model = resolve(base_dir, model);
    c.scan = resolve(base_dir, scan);
    c.camera = resolve(base_dir, camera);
    c.poses = resolve(base_dir, poses);
    c.output_dir = resolve(base_dir, output_dir.empty() ? std::string("out") : output_dir);
    r.opt("seed", c.seed);
    if (const json* s = r.child("sampling")) {
      Reader rs(*s, "sampling");
      rs.opt("rate", c.sampling.rate);
    }
    if (const json* s = r.child("colorize")) colorize_from(*s, c.colorize);
    if (const json* s = r.child("registration")) registration_params_from(*s, c.registration);
    if (const json* s = r.child("transfer")) transfer_from(*s, c.transfer);
  }
  return c;
}

std::string config_to_json(const PipelineConfig& config) { return dump(config_json(config)); }

PipelineConfig read_config(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_config(text, path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string registration_params_to_json(const RegistrationParams& params) {
  return dump(registration_params_json(params));
}

RegistrationParams parse_registration_params(std::string_view text) {
  RegistrationParams p;
  registration_params_from(parse_text(text, "registration parameters"), p);
  return p;
}

SyntheticSceneSpec parse_scene_spec(std::string_view text) {
  const json j = parse_text(text, "scene spec");
  SyntheticSceneSpec s;
  {
    Reader r(j, "scene spec");
    r.opt("facade_width", s.facade_width);
    r.opt("facade_height", s.facade_height);
    r.opt("side_depth", s.side_depth);
    r.opt("roof_depth", s.roof_depth);
    r.opt("roof_rise", s.roof_rise);
    r.opt("ground_margin", s.ground_margin);
    r.opt("ground_depth", s.ground_depth);
    r.opt("window_rows", s.window_rows);
    r.opt("window_cols", s.window_cols);
    r.opt("window_width", s.window_width);
    r.opt("window_height", s.window_height);
    r.opt("panel_recess", s.panel_recess);
    r.opt("door", s.door);
    r.opt("door_width", s.door_width);
    r.opt("door_height", s.door_height);
    r.opt("scan_rate", s.scan_rate);
    r.opt("noise_sigma", s.noise_sigma);
    r.opt("crop_fraction", s.crop_fraction);
    r.opt("clutter_points", s.clutter_points);
    if (const json* g = r.child("gt_transform")) {
      if (!g->is_null()) s.gt_transform = transform_from(*g);
    }
    r.opt("max_rotation_degrees", s.max_rotation_degrees);
    r.opt("max_translation", s.max_translation);
    r.opt("seed", s.seed);
    if (const json* c = r.child("camera")) s.camera = camera_from(*c);
    r.opt("frame_count", s.frame_count);
    r.opt("camera_distance", s.camera_distance);
    r.opt("camera_height", s.camera_height);
    r.opt("camera_tilt_degrees", s.camera_tilt_degrees);
    r.opt_point("scanner_position", s.scanner_position);
  }
  try {
    s.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidSpec) throw;
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
  return s;
}

std::string scene_spec_to_json(const SyntheticSceneSpec& spec) { return dump(spec_json(spec)); }

void write_scene(const fs::path& dir, const SyntheticScene& scene, const SyntheticSceneSpec& spec) {
  write_model(dir / "model.json", scene.model);
  write_ply(dir / "scan.ply", scene.scan);
  write_ply(dir / "scan_truth.ply", scene.scan_truth);
  write_transform(dir / "gt_transform.json", scene.gt_transform);
  write_camera(dir / "camera.json", scene.camera);
  std::vector<PoseEntry> poses;
  for (std::size_t k = 0; k < scene.frames.size(); ++k) {
    const std::string name = fmt::format("frame_{:02d}.pgm", k);
    write_pgm(dir / name, scene.frames[k].image);
    poses.push_back({name, scene.frames[k].world_to_camera});
  }
  write_file_atomic(dir / "poses.json", poses_to_json(poses));
  write_file_atomic(dir / "spec.json", scene_spec_to_json(spec));

  PipelineConfig config;
  config.model = "model.json";
  config.scan = "scan.ply";
  config.camera = "camera.json";
  config.poses = "poses.json";
  config.output_dir = "out";
  config.seed = spec.seed;
  config.registration.fgr.source_viewpoint = scene.scanner_scan;
  config.registration.fgr.target_viewpoint = scene.scanner_model;
  config.apply_seed();
  write_file_atomic(dir / "config.json", config_to_json(config));
}

std::string manifest_to_json(const PipelineConfig& config, const PipelineResult& result) {
  PipelineConfig abs = config;
  abs.model = absolute_path(config.model);
  abs.scan = absolute_path(config.scan);
  abs.camera = absolute_path(config.camera);
  abs.poses = absolute_path(config.poses);
  abs.output_dir = absolute_path(config.output_dir);

  const auto& reg = result.registration;
  json classes = json::array();
  for (std::size_t k = 0; k < kSemanticClassCount; ++k) {
    const auto& c = result.statistics.classes[k];
    classes.push_back(json{{"class", std::string(to_string(static_cast<SemanticClass>(k)))},
                           {"count", c.count},
                           {"intensity_count", c.intensity_count},
                           {"mean_intensity", number_or_null(c.mean)},
                           {"std_intensity", number_or_null(c.stddev)},
                           {"coverage", c.coverage}});
  }
  const auto stage = [](const RegistrationReport& r, const RegistrationMetrics& m) {
    return json{{"fitness", r.fitness},
                {"rmse", number_or_null(r.rmse)},
                {"inlier_count", m.inlier_count},
                {"iterations", r.iterations},
                {"converged", r.converged}};
  };
  json metrics{{"model_points", result.model_points},
               {"scan_points", result.scan_points},
               {"colorized_points", result.colorized_points},
               {"unlabeled_points", result.unlabeled_points},
               {"coarse", stage(reg.coarse, reg.coarse_metrics)},
               {"fine", stage(reg.fine, reg.fine_metrics)},
               {"transform", transform_json(reg.fine.transform)},
               {"rectification_skipped", reg.rectification_skipped},
               {"classes", classes}};
  json timings = json::array();
  for (const auto& t : result.timings) timings.push_back(json{{"stage", t.stage}, {"seconds", t.seconds}});
  const fs::path out = abs.output_dir;
  json outputs{{"model_points", (out / "model_points.ply").generic_string()},
               {"thermal", (out / "thermal.ply").generic_string()},
               {"registration", (out / "registration.json").generic_string()},
               {"transform", (out / "transform.json").generic_string()},
               {"enriched", (out / "enriched.ply").generic_string()},
               {"statistics", (out / "stats.csv").generic_string()}};
  json inputs{{"model", abs.model.generic_string()},
              {"scan", abs.scan.generic_string()},
              {"camera", abs.camera.generic_string()},
              {"poses", abs.poses.generic_string()}};
  return dump(json{{"inputs", inputs},
                   {"config", config_json(abs)},
                   {"metrics", metrics},
                   {"outputs", outputs},
                   {"timings", timings}});
}

}  // namespace thermalign::io
