#pragma once

#include <cstddef>
#include <vector>

#include "thermalign/error.hpp"
#include "thermalign/geometry.hpp"
#include "thermalign/kdtree.hpp"
#include "thermalign/normals.hpp"
#include "thermalign/registration.hpp"
#include "thermalign/transform.hpp"

namespace thermalign {

struct IcpParams {
  /// Correspondences farther apart than this are discarded (d_max).
  double max_correspondence_distance = 2.0;
  /// Convergence once the point-to-plane RMSE is at or below this (t_rmse).
  double rmse_threshold = 0.05;
  /// Iteration cap (t_it).
  std::size_t max_iterations = 50;
  /// Optional gate rejecting pairs whose source normal deviates from the
  /// target normal by more than `normal_gate_degrees`. Needs source normals.
  bool normal_gate = false;
  double normal_gate_degrees = 30.0;
  /// Radius for the source normals used by the gate.
  double normal_gate_radius = 0.3;

  void validate() const;
};

/// Per-iteration diagnostics of the linearised solve.
struct IcpIteration {
  std::size_t correspondences = 0;
  /// Sum of squared linearised residuals at the zero step and at the solution.
  double linearized_before = 0.0;
  double linearized_after = 0.0;
  double rmse = 0.0;
};

/// Thrown when an iteration ends up with no correspondences.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& message, RigidTransform last)
      : Error(ErrorCode::Divergence, message), last_(std::move(last)) {}
  const RigidTransform& last_transform() const noexcept { return last_; }

 private:
  RigidTransform last_;
};

/// Point-to-plane ICP from `init`. The per-iteration trace is the RMS of the
/// point-to-plane residuals over the surviving pairs after the update; the
/// report's fitness/RMSE come from evaluate_registration at d_max.
RegistrationReport icp_point_to_plane(const PointCloud& source, const PointCloud& target,
                                      const NormalCloud& target_normals, const RigidTransform& init,
                                      const IcpParams& params, std::vector<IcpIteration>* diagnostics = nullptr);

RegistrationReport icp_point_to_plane(const PointCloud& source, const PointCloud& target,
                                      const SpatialIndex& target_index, const NormalCloud& target_normals,
                                      const RigidTransform& init, const IcpParams& params,
                                      std::vector<IcpIteration>* diagnostics = nullptr);

}  // namespace thermalign
