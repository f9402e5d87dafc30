#pragma once

#include <Eigen/Core>

#include "thermalign/geometry.hpp"

namespace thermalign {

inline constexpr double kOrthonormalTolerance = 1e-9;

/// Proper rigid motion x -> R x + T.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vector3 translation = Vector3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Vector3& t);
  /// Rotation of `angle` radians about `axis` (need not be unit length).
  static RigidTransform from_axis_angle(const Vector3& axis, double angle,
                                        const Vector3& t = Vector3::Zero());

  Point3 apply(const Point3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
  Eigen::Matrix4d matrix() const;

  /// Largest entry of |RᵀR - I| and |det R - 1|.
  double orthonormality_error() const;
  bool is_valid(double tol = kOrthonormalTolerance) const;
  /// Throws Error(InvalidTransform) unless `is_valid(tol)`.
  void validate(double tol = kOrthonormalTolerance) const;

  /// Rotation angle of R in radians, in [0, pi].
  double rotation_angle() const;
};

/// compose(a, b) applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

/// Nearest rotation matrix in the Frobenius sense (polar decomposition).
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m);

/// Small-angle update: rotation polar(I + [w]x) followed by translation v.
RigidTransform twist_to_transform(const Eigen::Matrix<double, 6, 1>& twist);

/// Maps each point as R x + T. Attributes are copied unchanged.
PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t);

/// Rotation angle (rad) and translation distance between two transforms.
struct TransformError {
  double rotation_rad = 0.0;
  double translation = 0.0;
};
TransformError transform_error(const RigidTransform& estimate, const RigidTransform& truth);

}  // namespace thermalign
