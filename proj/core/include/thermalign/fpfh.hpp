#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "thermalign/geometry.hpp"
#include "thermalign/kdtree.hpp"
#include "thermalign/normals.hpp"

namespace thermalign {

inline constexpr int kFpfhBinsPerFeature = 11;
inline constexpr int kFpfhDimension = 3 * kFpfhBinsPerFeature;

using FpfhDescriptor = Eigen::Matrix<double, kFpfhDimension, 1>;

/// Angle triplet of one oriented point pair, in the conventional FPFH
/// Darboux frame: theta in [-pi, pi], alpha and phi in [-1, 1]. Absent
/// when the pair is degenerate (coincident points or parallel frame axes).
struct PairFeature {
  double theta = 0.0;
  double alpha = 0.0;
  double phi = 0.0;
  double distance = 0.0;
};
std::optional<PairFeature> compute_pair_feature(const Point3& p1, const Vector3& n1, const Point3& p2,
                                                const Vector3& n2);

struct FpfhResult {
  std::vector<FpfhDescriptor> descriptors;
  /// 0 for points whose descriptor is all zeros (invalid normal or no
  /// usable neighbours); such points are excluded from matching.
  std::vector<std::uint8_t> valid;
};

/// Fast point feature histograms: SPFH over neighbours within `radius`,
/// then inverse-squared-distance weighted aggregation of the neighbours'
/// SPFHs, each 11-bin block normalised to sum to 100.
FpfhResult compute_fpfh(const PointCloud& cloud, const NormalCloud& normals, double radius);
FpfhResult compute_fpfh(const PointCloud& cloud, const SpatialIndex& index, const NormalCloud& normals,
                        double radius);

}  // namespace thermalign
