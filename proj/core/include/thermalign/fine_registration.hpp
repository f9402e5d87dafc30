#pragma once

#include <optional>
#include <string>

#include "thermalign/geometry.hpp"
#include "thermalign/icp.hpp"
#include "thermalign/ransac.hpp"
#include "thermalign/registration.hpp"
#include "thermalign/transform.hpp"

namespace thermalign {

struct RectifyParams {
  /// Percentile of z used as each cloud's ground height.
  double ground_percentile = 5.0;
  /// Main planes whose normal is within this angle of vertical count as
  /// horizontal and cannot drive a facade rectification.
  double horizontal_tolerance_degrees = 30.0;
  /// Source and target main planes must agree in orientation within this angle.
  double max_plane_disagreement_degrees = 30.0;
};

struct RectifyResult {
  RigidTransform transform;  // translation only
  bool skipped = false;
  std::string warning;
};

/// Height and centre-point rectification. The vertical part lifts the source
/// ground height onto the target's; the horizontal part moves the source
/// main-plane centroid onto the target's along the horizontal component of
/// the target normal. Returns identity with `skipped` when either main plane
/// is near-horizontal or the two disagree.
RectifyResult rectify(const PointCloud& source, const Plane& source_plane, const PointCloud& target,
                      const Plane& target_plane, const RectifyParams& params = {});

/// Largest extracted plane that is not near-horizontal.
std::optional<Plane> select_main_plane(const std::vector<Plane>& planes, const RectifyParams& params = {});

/// z value at `percentile` (0-100) of the cloud, linear interpolation.
double height_percentile(const PointCloud& cloud, double percentile);

struct FineRegistrationParams {
  RansacParams ransac;
  IcpParams icp;
  RectifyParams rectify;
  double normal_radius = 0.3;
  int normal_min_neighbors = 5;
};

struct FineRegistrationDetails {
  RectifyResult rectification;
  std::size_t source_planes = 0;
  std::size_t target_planes = 0;
  std::vector<IcpIteration> icp;
};

/// Coarse transform, main-plane rectification, then point-to-plane ICP.
/// The report's transform maps the original source onto the target.
RegistrationReport register_fine(const PointCloud& source, const PointCloud& target, const RigidTransform& coarse,
                                 const FineRegistrationParams& params, FineRegistrationDetails* details = nullptr);

}  // namespace thermalign
