#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "thermalign/enrichment.hpp"
#include "thermalign/error.hpp"
#include "thermalign/fgr.hpp"
#include "thermalign/fine_registration.hpp"
#include "thermalign/metrics.hpp"
#include "thermalign/projection.hpp"
#include "thermalign/registration.hpp"
#include "thermalign/sampling.hpp"

namespace thermalign {

/// An error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, ErrorCode code, const std::string& message)
      : Error(code, "[" + stage + "] " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct RegistrationParams {
  FgrParams fgr;
  FineRegistrationParams fine;
  /// Threshold of the fitness/RMSE reported for both stages.
  double evaluation_threshold = 2.0;
};

struct RegistrationResult {
  RegistrationReport coarse;
  RegistrationReport fine;
  RegistrationMetrics coarse_metrics;
  RegistrationMetrics fine_metrics;
  bool rectification_skipped = false;
  std::string rectification_warning;
};

/// FGR followed by rectification and point-to-plane ICP. Both reports'
/// fitness and RMSE are replaced by evaluate_registration at
/// `evaluation_threshold`. Errors come back as StageError ("coarse" or
/// "fine").
RegistrationResult register_clouds(const PointCloud& source, const PointCloud& target,
                                   const RegistrationParams& params);

struct PipelineConfig {
  std::filesystem::path model;
  std::filesystem::path scan;
  std::filesystem::path camera;
  std::filesystem::path poses;
  std::filesystem::path output_dir;
  SamplingParams sampling;
  ColorizeParams colorize;
  RegistrationParams registration;
  TransferParams transfer;
  std::uint64_t seed = 42;

  /// Copies `seed` into every randomised stage.
  void apply_seed();
  void validate() const;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  RegistrationResult registration;
  ClassStatistics statistics;
  std::size_t model_points = 0;
  std::size_t scan_points = 0;
  std::size_t colorized_points = 0;
  std::size_t unlabeled_points = 0;
  std::vector<StageTiming> timings;
  std::filesystem::path manifest;
};

/// sample -> colorize -> register -> enrich -> statistics. Writes into
/// `output_dir`: model_points.ply, thermal.ply, registration.json,
/// transform.json, enriched.ply, stats.csv and manifest.json. The first
/// failing stage aborts with a StageError.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace thermalign
