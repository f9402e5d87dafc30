#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "thermalign/geometry.hpp"
#include "thermalign/transform.hpp"

namespace thermalign {

/// Pinhole intrinsics K = [[s f, 0, cx], [0, f, cy], [0, 0, 1]].
/// Pixel (col, row) covers [col, col+1) x [row, row+1).
struct CameraModel {
  double focal = 1.0;
  double aspect = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  Eigen::Matrix3d intrinsics() const;
  void validate() const;
};

/// Grayscale image with values normalised to [0, 1], row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int w, int h, float fill = 0.0f)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  float at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  float& at(int col, int row) { return pixels[static_cast<std::size_t>(row) * width + col]; }

  /// Bilinear sample at continuous pixel coordinates (u, v); pixel centres
  /// sit at (col + 0.5, row + 0.5). Border pixels are clamped.
  double bilinear(double u, double v) const;
  /// Value of the pixel containing (u, v).
  double nearest(double u, double v) const;
};

/// One thermal frame: world -> camera extrinsics and its image.
struct FramePose {
  RigidTransform world_to_camera;
  Image image;
};

/// Labels rendered into image space; `kBackground` marks empty pixels.
struct LabelImage {
  static constexpr std::uint8_t kBackground = 255;

  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::optional<SemanticClass> label(int col, int row) const {
    const auto v = at(col, row);
    if (v == kBackground) return std::nullopt;
    return static_cast<SemanticClass>(v);
  }
};

}  // namespace thermalign
