#pragma once

// Independent reference implementations used as test oracles. They favour
// obviousness over speed: brute force, textbook formulas, no shared code
// with the library beyond plain data types.

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "thermalign/building_model.hpp"
#include "thermalign/camera.hpp"
#include "thermalign/geometry.hpp"
#include "thermalign/transform.hpp"

namespace oracle {

using thermalign::Point3;
using thermalign::Vector3;

struct Nearest {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Linear scan over squared distances; the lowest index wins ties.
Nearest brute_nearest(const std::vector<Point3>& points, const Point3& q);

struct Metrics {
  std::vector<std::size_t> inliers;  // source indices, ascending
  double fitness = 0.0;
  std::optional<double> rmse;
};

/// Fitness = #inliers / #target, RMSE over inlier distances.
Metrics brute_metrics(const std::vector<Point3>& source, const std::vector<Point3>& target,
                      const thermalign::RigidTransform& t, double threshold);

/// Winding number of a closed 2D ring around q (non-zero = inside).
int winding_number(const Eigen::Vector2d& q, const thermalign::Ring2& ring);

struct PlaneFit {
  Vector3 normal;
  double offset = 0.0;
};

/// Total least-squares plane via SVD of the centred point matrix; the
/// normal's largest-magnitude component is made positive.
PlaneFit svd_plane(const std::vector<Point3>& points);

/// u = K [R|T] X with an explicit 3x4 matrix.
Eigen::Vector2d projection_matrix_product(const thermalign::CameraModel& cam, const thermalign::RigidTransform& pose,
                                          const Point3& x);

/// Angle triplet of an oriented pair following the textbook Darboux-frame
/// construction (source = endpoint whose normal makes the smaller angle
/// with the connecting line).
struct PairAngles {
  double theta, alpha, phi;
};
std::optional<PairAngles> darboux_angles(const Point3& ps, const Vector3& ns, const Point3& pt, const Vector3& nt);

/// O(n^2) FPFH: SPFH histograms over radius neighbours (self excluded),
/// inverse-squared-distance weighted sum of neighbour SPFHs, each 11-bin
/// block scaled to 100. Returns 33 values per point.
std::vector<std::vector<double>> brute_fpfh(const std::vector<Point3>& points, const std::vector<Vector3>& normals,
                                            double radius);

/// Two-pass mean and population standard deviation.
std::pair<double, double> two_pass_mean_std(const std::vector<double>& values);

/// Central finite difference of f at x with step h.
template <typename F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Random proper rotation (QR of a Gaussian matrix with sign fix).
Eigen::Matrix3d random_rotation(std::mt19937_64& rng);
thermalign::RigidTransform random_transform(std::mt19937_64& rng, double max_translation);

}  // namespace oracle
