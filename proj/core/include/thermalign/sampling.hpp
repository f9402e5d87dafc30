#pragma once

#include <Eigen/Core>

#include "thermalign/building_model.hpp"
#include "thermalign/geometry.hpp"

namespace thermalign {

struct SamplingParams {
  /// Grid spacing s_r in metres.
  double rate = 0.1;
};

/// Regular-grid samples of one surface, labelled with the surface's class
/// and id. The grid is axis-aligned in the surface's (u, v) frame and
/// anchored at the (u, v) bounding-box minimum shifted by `anchor_offset`
/// (components taken modulo the rate).
PointCloud sample_surface(const SemanticSurface& surface, double rate,
                          const Eigen::Vector2d& anchor_offset = Eigen::Vector2d::Zero());

/// Samples every surface and concatenates them in model order.
/// Throws Error(EmptyOutput) when no grid point falls on any surface.
PointCloud sample_model(const BuildingModel& model, const SamplingParams& params);

}  // namespace thermalign
