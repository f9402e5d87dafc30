#include "thermalign/camera.hpp"

#include <algorithm>
#include <cmath>

#include "thermalign/error.hpp"

namespace thermalign {

Eigen::Matrix3d CameraModel::intrinsics() const {
  Eigen::Matrix3d k;
  k << aspect * focal, 0.0, cx, 0.0, focal, cy, 0.0, 0.0, 1.0;
  return k;
}

void CameraModel::validate() const {
  if (!(focal > 0.0) || !std::isfinite(focal)) throw Error(ErrorCode::InvalidParameter, "camera focal length must be positive");
  if (!(aspect > 0.0) || !std::isfinite(aspect)) throw Error(ErrorCode::InvalidParameter, "camera aspect ratio must be positive");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidParameter, "camera image size must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy)) throw Error(ErrorCode::InvalidParameter, "non-finite principal point");
}

double Image::bilinear(double u, double v) const {
  const double x = u - 0.5;
  const double y = v - 0.5;
  const double x0f = std::floor(x);
  const double y0f = std::floor(y);
  const double fx = x - x0f;
  const double fy = y - y0f;
  const auto clampc = [this](double c) { return static_cast<int>(std::clamp(c, 0.0, static_cast<double>(width - 1))); };
  const auto clampr = [this](double r) { return static_cast<int>(std::clamp(r, 0.0, static_cast<double>(height - 1))); };
  const int c0 = clampc(x0f);
  const int c1 = clampc(x0f + 1.0);
  const int r0 = clampr(y0f);
  const int r1 = clampr(y0f + 1.0);
  const double top = (1.0 - fx) * at(c0, r0) + fx * at(c1, r0);
  const double bottom = (1.0 - fx) * at(c0, r1) + fx * at(c1, r1);
  return (1.0 - fy) * top + fy * bottom;
}

double Image::nearest(double u, double v) const {
  const int c = std::clamp(static_cast<int>(std::floor(u)), 0, width - 1);
  const int r = std::clamp(static_cast<int>(std::floor(v)), 0, height - 1);
  return at(c, r);
}

}  // namespace thermalign
