#include "thermalign/enrichment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermalign/error.hpp"
#include "thermalign/parallel.hpp"

namespace thermalign {

void TransferParams::validate() const {
  if (!(max_distance > 0.0)) throw Error(ErrorCode::InvalidParameter, "transfer max_distance must be positive");
}

PointCloud transfer_labels(const PointCloud& thermal, const PointCloud& model, const RigidTransform& t,
                           const TransferParams& params) {
  if (model.empty()) throw Error(ErrorCode::InvalidParameter, "transfer_labels: empty model cloud");
  return transfer_labels(thermal, model, build_index(model), t, params);
}

PointCloud transfer_labels(const PointCloud& thermal, const PointCloud& model, const SpatialIndex& model_index,
                           const RigidTransform& t, const TransferParams& params) {
  params.validate();
  t.validate();
  if (!model.has_labels() || model.empty()) {
    throw Error(ErrorCode::InvalidParameter, "transfer_labels: model cloud carries no labels");
  }
  for (auto label : model.labels) {
    if (label == SemanticClass::Unlabeled) {
      throw Error(ErrorCode::InvalidParameter, "transfer_labels: model cloud has unlabelled points");
    }
  }

  PointCloud out;
  out.points = thermal.points;
  out.intensity = thermal.intensity;
  out.id_names = model.id_names;
  out.labels.assign(thermal.size(), SemanticClass::Unlabeled);
  out.ids.assign(thermal.size(), kNoId);

  const auto n = static_cast<std::ptrdiff_t>(thermal.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Point3 p = t.apply(thermal.points[i]);
    if (params.georeference) out.points[i] = p;
    const auto nb = model_index.nearest(p);
    if (nb.distance <= params.max_distance) {
      out.labels[i] = model.labels[nb.index];
      if (model.has_ids()) out.ids[i] = model.ids[nb.index];
    }
  }
  return out;
}

ClassStatistics class_statistics(const PointCloud& enriched) {
  if (!enriched.has_labels()) throw Error(ErrorCode::InvalidParameter, "class_statistics: cloud carries no labels");
  if (!enriched.has_intensity()) {
    throw Error(ErrorCode::InvalidParameter, "class_statistics: cloud carries no intensities");
  }
  ClassStatistics stats;
  stats.total = enriched.size();
  std::array<double, kSemanticClassCount> m2{};
  bool any = false;
  for (std::size_t i = 0; i < enriched.size(); ++i) {
    auto& c = stats.classes[static_cast<std::size_t>(enriched.labels[i])];
    ++c.count;
    if (!enriched.point_has_intensity(i)) continue;
    any = true;
    // Welford update
    const double x = enriched.intensity[i];
    ++c.intensity_count;
    const double delta = x - c.mean;
    c.mean += delta / static_cast<double>(c.intensity_count);
    m2[static_cast<std::size_t>(enriched.labels[i])] += delta * (x - c.mean);
  }
  if (!any) throw Error(ErrorCode::InvalidParameter, "class_statistics: no point carries an intensity");
  for (std::size_t k = 0; k < kSemanticClassCount; ++k) {
    auto& c = stats.classes[k];
    if (c.intensity_count > 0) {
      c.stddev = std::sqrt(std::max(0.0, m2[k] / static_cast<double>(c.intensity_count)));
    } else {
      c.mean = std::numeric_limits<double>::quiet_NaN();
      c.stddev = std::numeric_limits<double>::quiet_NaN();
    }
    c.coverage = stats.total ? static_cast<double>(c.count) / static_cast<double>(stats.total) : 0.0;
  }
  return stats;
}

}  // namespace thermalign
