// thermalign command-line front end.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "thermalign/enrichment.hpp"
#include "thermalign/io/file_util.hpp"
#include "thermalign/io/json_io.hpp"
#include "thermalign/io/ply.hpp"
#include "thermalign/parallel.hpp"
#include "thermalign/pipeline.hpp"
#include "thermalign/sampling.hpp"
#include "thermalign/synth.hpp"

namespace fs = std::filesystem;
using namespace thermalign;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAlgorithm = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoCorrespondence:
    case ErrorCode::NoPlane:
    case ErrorCode::Divergence: return kExitAlgorithm;
    default: return kExitData;
  }
}

int report(const std::string& stage, const Error& e) {
  if (dynamic_cast<const StageError*>(&e)) {
    std::cerr << "thermalign: " << e.what() << " (" << to_string(e.code()) << ")\n";
  } else {
    std::cerr << "thermalign: [" << stage << "] " << e.what() << " (" << to_string(e.code()) << ")\n";
  }
  return exit_code_for(e.code());
}

template <typename F>
int guarded(const std::string& stage, F&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const Error& e) {
    return report(stage, e);
  } catch (const std::exception& e) {
    std::cerr << "thermalign: [" << stage << "] " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-registration of thermal point clouds with semantic building models"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: THERMALIGN_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  std::uint64_t seed = 42;

  // sample
  auto* sample = app.add_subcommand("sample", "Sample a building model on a regular grid");
  std::string sample_model_path, sample_out;
  double rate = 0.1;
  sample->add_option("model", sample_model_path, "Model JSON")->required();
  sample->add_option("out", sample_out, "Output PLY")->required();
  sample->add_option("--rate", rate, "Grid spacing in metres")->capture_default_str();

  // register
  auto* reg = app.add_subcommand("register", "Coarse-to-fine registration of source onto target");
  std::string reg_source, reg_target, reg_report, reg_params, reg_transform;
  reg->add_option("source", reg_source, "Source PLY (thermal cloud)")->required();
  reg->add_option("target", reg_target, "Target PLY (model cloud)")->required();
  reg->add_option("report", reg_report, "Output report JSON")->required();
  reg->add_option("--params", reg_params, "Registration parameter JSON");
  reg->add_option("--transform", reg_transform, "Also write the final transform JSON here");
  auto* reg_seed = reg->add_option("--seed", seed, "RNG seed")->capture_default_str();

  // enrich
  auto* enrich = app.add_subcommand("enrich", "Transfer model labels onto a registered thermal cloud");
  std::string en_thermal, en_model, en_transform, en_out, en_stats;
  TransferParams transfer;
  enrich->add_option("thermal", en_thermal, "Thermal PLY")->required();
  enrich->add_option("model", en_model, "Labelled model PLY")->required();
  enrich->add_option("transform", en_transform, "Transform JSON mapping thermal into the model frame")->required();
  enrich->add_option("out", en_out, "Output enriched PLY")->required();
  enrich->add_option("stats", en_stats, "Output statistics CSV")->required();
  enrich->add_option("--max-distance", transfer.max_distance, "Label transfer threshold in metres")
      ->capture_default_str();
  enrich->add_flag("--georeference", transfer.georeference, "Write model-frame coordinates");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic facade scene with ground truth");
  std::string synth_spec, synth_out;
  synth->add_option("spec", synth_spec, "Scene spec JSON")->required();
  synth->add_option("out", synth_out, "Output directory")->required();
  auto* synth_seed = synth->add_option("--seed", seed, "RNG seed (overrides the spec)");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Run sample, colorize, register, enrich and statistics");
  std::string pipe_config, pipe_out;
  pipe->add_option("config", pipe_config, "Pipeline config JSON (or a previous run manifest)")->required();
  pipe->add_option("--output-dir", pipe_out, "Override the output directory");
  auto* pipe_seed = pipe->add_option("--seed", seed, "RNG seed (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (threads > 0) set_thread_count(threads);

  if (*sample) {
    return guarded("sampling", [&] {
      const BuildingModel model = io::read_model(sample_model_path);
      io::write_ply(sample_out, sample_model(model, SamplingParams{rate}));
    });
  }

  if (*reg) {
    RegistrationParams params;
    PointCloud source, target;
    if (int rc = guarded("input", [&] {
          if (!reg_params.empty()) params = io::parse_registration_params(io::read_file(reg_params));
          source = io::read_ply(reg_source);
          target = io::read_ply(reg_target);
        })) {
      return rc;
    }
    if (*reg_seed || reg_params.empty()) {
      params.fgr.seed = seed;
      params.fine.ransac.seed = seed;
    }
    return guarded("registration", [&] {
      io::RegistrationDocument doc;
      doc.result = register_clouds(source, target, params);
      doc.params = params;
      doc.seed = params.fgr.seed;
      io::write_file_atomic(reg_report, io::registration_to_json(doc));
      if (!reg_transform.empty()) io::write_transform(reg_transform, doc.result.fine.transform);
    });
  }

  if (*enrich) {
    return guarded("enrichment", [&] {
      const PointCloud thermal = io::read_ply(en_thermal);
      const PointCloud model = io::read_ply(en_model);
      const RigidTransform t = io::read_transform(en_transform);
      const PointCloud enriched = transfer_labels(thermal, model, t, transfer);
      const ClassStatistics stats = class_statistics(enriched);
      io::write_ply(en_out, enriched);
      io::write_file_atomic(en_stats, io::statistics_to_csv(stats));
    });
  }

  if (*synth) {
    return guarded("synthesis", [&] {
      SyntheticSceneSpec spec = io::parse_scene_spec(io::read_file(synth_spec));
      if (*synth_seed) spec.seed = seed;
      const SyntheticScene scene = generate_scene(spec);
      io::write_scene(synth_out, scene, spec);
    });
  }

  if (*pipe) {
    return guarded("config", [&] {
      PipelineConfig config = io::read_config(pipe_config);
      if (*pipe_seed) config.seed = seed;
      if (!pipe_out.empty()) config.output_dir = pipe_out;
      const PipelineResult result = run_pipeline(config);
      const auto& fine = result.registration.fine;
      std::cout << "fitness " << fine.fitness << " rmse " << fine.rmse << " converged " << std::boolalpha
                << fine.converged << "\nmanifest " << result.manifest.string() << "\n";
    });
  }
  return kExitUsage;
}
