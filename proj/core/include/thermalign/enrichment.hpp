#pragma once

#include <array>
#include <cstddef>

#include "thermalign/geometry.hpp"
#include "thermalign/kdtree.hpp"
#include "thermalign/transform.hpp"

namespace thermalign {

struct TransferParams {
  /// Thermal points farther than this from every model point stay unlabelled.
  double max_distance = 0.3;
  /// Replace output coordinates with the transformed (model-frame) ones.
  bool georeference = false;

  void validate() const;
};

/// Copies label and id of the nearest model point onto each thermal point
/// after mapping it with `t`. Intensities are kept; `id_names` of the output
/// is the model's table.
PointCloud transfer_labels(const PointCloud& thermal, const PointCloud& model, const RigidTransform& t,
                           const TransferParams& params = {});

PointCloud transfer_labels(const PointCloud& thermal, const PointCloud& model, const SpatialIndex& model_index,
                           const RigidTransform& t, const TransferParams& params = {});

struct ClassStats {
  std::size_t count = 0;
  /// Points of this class that carry an intensity.
  std::size_t intensity_count = 0;
  double mean = 0.0;
  /// Population standard deviation.
  double stddev = 0.0;
  /// count / cloud size.
  double coverage = 0.0;
};

struct ClassStatistics {
  std::array<ClassStats, kSemanticClassCount> classes{};
  std::size_t total = 0;

  const ClassStats& operator[](SemanticClass c) const { return classes[static_cast<std::size_t>(c)]; }
};

ClassStatistics class_statistics(const PointCloud& enriched);

}  // namespace thermalign
