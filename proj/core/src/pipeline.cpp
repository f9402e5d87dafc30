#include "thermalign/pipeline.hpp"

#include <chrono>
#include <utility>

#include "thermalign/io/file_util.hpp"
#include "thermalign/io/json_io.hpp"
#include "thermalign/io/ply.hpp"

namespace thermalign {
namespace {

template <typename F>
auto run_stage(const std::string& name, std::vector<StageTiming>* timings, F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    if (timings) {
      const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
      timings->push_back({name, d.count()});
    }
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record();
    } else {
      auto value = fn();
      record();
      return value;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.code(), e.what());
  }
}

}  // namespace

RegistrationResult register_clouds(const PointCloud& source, const PointCloud& target,
                                   const RegistrationParams& params) {
  if (!(params.evaluation_threshold > 0.0)) {
    throw StageError("coarse", ErrorCode::InvalidParameter, "evaluation threshold must be positive");
  }
  RegistrationResult out;
  out.coarse = run_stage("coarse", nullptr, [&] { return fgr_register(source, target, params.fgr); });
  FineRegistrationDetails details;
  out.fine = run_stage("fine", nullptr,
                       [&] { return register_fine(source, target, out.coarse.transform, params.fine, &details); });
  out.rectification_skipped = details.rectification.skipped;
  out.rectification_warning = details.rectification.warning;

  const SpatialIndex index = build_index(target);
  out.coarse_metrics = evaluate_registration(source, target, index, out.coarse.transform, params.evaluation_threshold);
  out.fine_metrics = evaluate_registration(source, target, index, out.fine.transform, params.evaluation_threshold);
  out.coarse.fitness = out.coarse_metrics.fitness;
  out.coarse.rmse = out.coarse_metrics.rmse;
  out.fine.fitness = out.fine_metrics.fitness;
  out.fine.rmse = out.fine_metrics.rmse;
  return out;
}

void PipelineConfig::apply_seed() {
  registration.fgr.seed = seed;
  registration.fine.ransac.seed = seed;
}

void PipelineConfig::validate() const {
  const auto need = [](const std::filesystem::path& p, const char* what) {
    if (p.empty()) throw Error(ErrorCode::InvalidParameter, std::string("config: missing path '") + what + "'");
  };
  need(model, "model");
  need(scan, "scan");
  need(camera, "camera");
  need(poses, "poses");
  need(output_dir, "output_dir");
  if (!(sampling.rate > 0.0)) throw Error(ErrorCode::InvalidParameter, "config: sampling rate must be positive");
  if (!(colorize.depth_tolerance >= 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "config: depth tolerance must be non-negative");
  }
  registration.fgr.validate();
  registration.fine.ransac.validate();
  registration.fine.icp.validate();
  transfer.validate();
  if (!(registration.evaluation_threshold > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "config: evaluation threshold must be positive");
  }
}

PipelineResult run_pipeline(const PipelineConfig& input) {
  PipelineConfig config = input;
  run_stage("config", nullptr, [&] {
    config.apply_seed();
    config.validate();
  });
  const auto& out_dir = config.output_dir;

  PipelineResult result;
  auto* timings = &result.timings;

  const PointCloud model_points = run_stage("sampling", timings, [&] {
    const BuildingModel model = io::read_model(config.model);
    PointCloud cloud = sample_model(model, config.sampling);
    io::write_ply(out_dir / "model_points.ply", cloud);
    return cloud;
  });
  result.model_points = model_points.size();

  const PointCloud thermal = run_stage("projection", timings, [&] {
    const CameraModel camera = io::read_camera(config.camera);
    const std::vector<FramePose> frames = io::read_frames(config.poses, camera);
    const PointCloud scan = io::read_ply(config.scan);
    PointCloud colored = colorize_cloud(scan, camera, frames, config.colorize);
    io::write_ply(out_dir / "thermal.ply", colored);
    return colored;
  });
  result.scan_points = thermal.size();
  for (std::size_t i = 0; i < thermal.size(); ++i) {
    if (thermal.point_has_intensity(i)) ++result.colorized_points;
  }

  const auto start = std::chrono::steady_clock::now();
  result.registration = register_clouds(thermal, model_points, config.registration);
  const std::chrono::duration<double> reg_time = std::chrono::steady_clock::now() - start;
  result.timings.push_back({"registration", reg_time.count()});
  run_stage("registration", nullptr, [&] {
    io::RegistrationDocument doc{result.registration, config.registration, config.seed};
    io::write_file_atomic(out_dir / "registration.json", io::registration_to_json(doc));
    io::write_transform(out_dir / "transform.json", result.registration.fine.transform);
  });

  const PointCloud enriched = run_stage("enrichment", timings, [&] {
    PointCloud cloud = transfer_labels(thermal, model_points, result.registration.fine.transform, config.transfer);
    io::write_ply(out_dir / "enriched.ply", cloud);
    return cloud;
  });
  for (auto label : enriched.labels) {
    if (label == SemanticClass::Unlabeled) ++result.unlabeled_points;
  }

  result.statistics = run_stage("statistics", timings, [&] {
    ClassStatistics stats = class_statistics(enriched);
    io::write_file_atomic(out_dir / "stats.csv", io::statistics_to_csv(stats));
    return stats;
  });

  run_stage("manifest", nullptr, [&] {
    result.manifest = out_dir / "manifest.json";
    io::write_file_atomic(result.manifest, io::manifest_to_json(config, result));
  });
  return result;
}

}  // namespace thermalign
