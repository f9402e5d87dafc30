#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "thermalign/building_model.hpp"
#include "thermalign/camera.hpp"
#include "thermalign/enrichment.hpp"
#include "thermalign/pipeline.hpp"
#include "thermalign/synth.hpp"
#include "thermalign/transform.hpp"

namespace thermalign::io {

/// `{"surfaces": [{"label", "id", "outer": [[x,y,z],...], "holes": [[[x,y,z],...],...]}]}`
BuildingModel parse_model(std::string_view text);
std::string model_to_json(const BuildingModel& model);
BuildingModel read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const BuildingModel& model);

/// `{"rotation": [9 values, row-major], "translation": [3]}`. Rotations are
/// accepted within 1e-6 of orthonormal; those off by more than 1e-9 are
/// projected onto SO(3).
RigidTransform parse_transform(std::string_view text);
std::string transform_to_json(const RigidTransform& t);
RigidTransform read_transform(const std::filesystem::path& path);
void write_transform(const std::filesystem::path& path, const RigidTransform& t);

/// `{"focal", "aspect", "cx", "cy", "width", "height"}`
CameraModel parse_camera(std::string_view text);
std::string camera_to_json(const CameraModel& camera);
CameraModel read_camera(const std::filesystem::path& path);
void write_camera(const std::filesystem::path& path, const CameraModel& camera);

/// One entry of a pose file: image path plus world -> camera transform.
struct PoseEntry {
  std::string image;
  RigidTransform world_to_camera;
};

/// `[{"image": path, "rotation": [9], "translation": [3]}, ...]`
std::vector<PoseEntry> parse_poses(std::string_view text);
std::string poses_to_json(const std::vector<PoseEntry>& poses);

/// Loads the pose file and every referenced PGM (paths relative to the
/// pose file). Images must match the camera size.
std::vector<FramePose> read_frames(const std::filesystem::path& pose_file, const CameraModel& camera);

/// Report of one registration run.
struct RegistrationDocument {
  RegistrationResult result;
  RegistrationParams params;
  std::uint64_t seed = 42;
};

std::string registration_to_json(const RegistrationDocument& doc);
RegistrationDocument parse_registration(std::string_view text);

/// Per-class CSV with header `class,count,mean_intensity,std_intensity`.
std::string statistics_to_csv(const ClassStatistics& stats);

/// Pipeline configuration. Relative paths resolve against `base_dir`. A
/// run manifest is accepted too (its "config" member is used).
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
std::string config_to_json(const PipelineConfig& config);
PipelineConfig read_config(const std::filesystem::path& path);

std::string registration_params_to_json(const RegistrationParams& params);
RegistrationParams parse_registration_params(std::string_view text);

SyntheticSceneSpec parse_scene_spec(std::string_view text);
std::string scene_spec_to_json(const SyntheticSceneSpec& spec);

/// Writes model.json, scan.ply, scan_truth.ply, gt_transform.json,
/// camera.json, poses.json, frame_XX.pgm, spec.json and a pipeline
/// config.json (output into `<dir>/out`).
void write_scene(const std::filesystem::path& dir, const SyntheticScene& scene, const SyntheticSceneSpec& spec);

/// Manifest of a pipeline run.
std::string manifest_to_json(const PipelineConfig& config, const PipelineResult& result);

}  // namespace thermalign::io
