#include "thermalign/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "thermalign/error.hpp"

namespace thermalign {

RigidTransform RigidTransform::from_translation(const Vector3& t) {
  RigidTransform out;
  out.translation = t;
  return out;
}

RigidTransform RigidTransform::from_axis_angle(const Vector3& axis, double angle, const Vector3& t) {
  RigidTransform out;
  if (axis.norm() > 0.0) {
    out.rotation = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  }
  out.translation = t;
  return out;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation = rotation.transpose();
  out.translation = -(out.rotation * translation);
  return out;
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

double RigidTransform::orthonormality_error() const {
  if (!rotation.allFinite() || !translation.allFinite()) {
    return std::numeric_limits<double>::infinity();
  }
  const double gram = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return std::max(gram, std::abs(rotation.determinant() - 1.0));
}

bool RigidTransform::is_valid(double tol) const { return orthonormality_error() <= tol; }

void RigidTransform::validate(double tol) const {
  if (!is_valid(tol)) {
    throw Error(ErrorCode::InvalidTransform,
                "rotation is not orthonormal with det +1 (error " +
                    std::to_string(orthonormality_error()) + ")");
  }
}

double RigidTransform::rotation_angle() const {
  const double c = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

RigidTransform twist_to_transform(const Eigen::Matrix<double, 6, 1>& twist) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 1) = -twist(2);
  m(0, 2) = twist(1);
  m(1, 0) = twist(2);
  m(1, 2) = -twist(0);
  m(2, 0) = -twist(1);
  m(2, 1) = twist(0);
  RigidTransform out;
  out.rotation = nearest_rotation(m);
  out.translation = twist.tail<3>();
  return out;
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t) {
  t.validate();
  PointCloud out = cloud;
  for (auto& p : out.points) p = t.apply(p);
  return out;
}

TransformError transform_error(const RigidTransform& estimate, const RigidTransform& truth) {
  RigidTransform delta;
  delta.rotation = estimate.rotation * truth.rotation.transpose();
  return {delta.rotation_angle(), (estimate.translation - truth.translation).norm()};
}

}  // namespace thermalign
