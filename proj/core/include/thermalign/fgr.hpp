#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "thermalign/geometry.hpp"
#include "thermalign/matching.hpp"
#include "thermalign/registration.hpp"
#include "thermalign/transform.hpp"

namespace thermalign {

/// Scaled Geman-McClure penalty rho(r) = mu r^2 / (mu + r^2).
inline double geman_mcclure(double r, double mu) {
  const double r2 = r * r;
  return mu * r2 / (mu + r2);
}

/// d rho / d r = 2 mu^2 r / (mu + r^2)^2.
inline double geman_mcclure_derivative(double r, double mu) {
  const double s = mu + r * r;
  return 2.0 * mu * mu * r / (s * s);
}

/// Closed-form line-process weight minimising l r^2 + mu (sqrt(l) - 1)^2.
inline double line_process_weight(double r2, double mu) {
  const double s = mu / (mu + r2);
  return s * s;
}

/// Joint objective of the line-process form for fixed weights.
double line_process_objective(std::span<const double> squared_residuals, std::span<const double> weights, double mu);

struct FgrParams {
  double voxel_size = 0.2;
  double normal_radius = 0.5;
  double feature_radius = 1.0;
  int normal_min_neighbors = 5;
  double tuple_scale = 0.9;
  std::size_t max_tuples = 1000;
  std::size_t max_iterations = 100;
  /// mu starts at diameter^2 / division_factor and halves every 4 iterations.
  double division_factor = 1.4;
  /// The mu schedule stops at max_correspondence_distance^2.
  double max_correspondence_distance = 0.2;
  std::uint64_t seed = 42;
  /// Normals are flipped toward these points (each in its cloud's frame).
  Point3 source_viewpoint = Point3::Zero();
  Point3 target_viewpoint = Point3::Zero();
  /// Optional [min, max] z window applied to both clouds before matching.
  std::optional<std::pair<double, double>> z_range;
  /// Threshold of the fitness/RMSE evaluation stored in the report.
  double evaluation_threshold = 2.0;

  void validate() const;
};

/// Joint objective values around one alternation step, all at the same mu.
struct LineProcessRecord {
  double mu = 0.0;
  /// E(T_k, l_{k-1}): previous weights, current transform.
  double before_weights = 0.0;
  /// E(T_k, l_k): after the closed-form weight update.
  double after_weights = 0.0;
  /// E(T_{k+1}, l_k): after the Gauss-Newton step.
  double after_step = 0.0;
};

struct FgrTrace {
  std::size_t source_points = 0;
  std::size_t target_points = 0;
  CorrespondenceSet correspondences;
  std::vector<LineProcessRecord> records;
};

/// Minimises sum rho(|target_j - T source_i|) over the correspondences by
/// alternating closed-form line-process weights with damped Gauss-Newton
/// steps on the linearised rotation. Returns T mapping source to target.
/// `converged` is set when mu reached its floor and the last step was
/// negligible.
RigidTransform optimize_line_process(std::span<const Point3> source, std::span<const Point3> target,
                                     const CorrespondenceSet& correspondences, const FgrParams& params,
                                     std::vector<LineProcessRecord>* records = nullptr, bool* converged = nullptr,
                                     std::vector<double>* rms_trace = nullptr);

/// Feature-based global registration: voxel downsampling, normals, FPFH,
/// mutual + tuple matching, then robust line-process optimisation. Fitness
/// and RMSE in the report are evaluated on the full clouds.
RegistrationReport fgr_register(const PointCloud& source, const PointCloud& target, const FgrParams& params,
                                FgrTrace* trace = nullptr);

}  // namespace thermalign
