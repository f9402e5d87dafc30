#include "thermalign/fine_registration.hpp"

#include "thermalign/kdtree.hpp"
#include "thermalign/normals.hpp"

namespace thermalign {

RegistrationReport register_fine(const PointCloud& source, const PointCloud& target, const RigidTransform& coarse,
                                 const FineRegistrationParams& params, FineRegistrationDetails* details) {
  coarse.validate();
  const PointCloud moved = apply_transform(source, coarse);

  const std::vector<Plane> source_planes = ransac_plane(moved, params.ransac);
  const std::vector<Plane> target_planes = ransac_plane(target, params.ransac);
  const auto source_main = select_main_plane(source_planes, params.rectify);
  const auto target_main = select_main_plane(target_planes, params.rectify);

  RectifyResult rect;
  if (source_main && target_main) {
    rect = rectify(moved, *source_main, target, *target_main, params.rectify);
  } else {
    rect.skipped = true;
    rect.warning = "no non-horizontal main plane found; rectification skipped";
  }

  const SpatialIndex index = build_index(target);
  const NormalCloud normals = estimate_normals(target, index, params.normal_radius, params.normal_min_neighbors);
  std::vector<IcpIteration> iterations;
  RegistrationReport report = icp_point_to_plane(source, target, index, normals, compose(rect.transform, coarse),
                                                 params.icp, details ? &iterations : nullptr);
  if (details) {
    details->rectification = rect;
    details->source_planes = source_planes.size();
    details->target_planes = target_planes.size();
    details->icp = std::move(iterations);
  }
  return report;
}

}  // namespace thermalign
