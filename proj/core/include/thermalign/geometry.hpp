#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace thermalign {

using Point3 = Eigen::Vector3d;
using Vector3 = Eigen::Vector3d;

/// Facade-level semantic classes. The numeric values are the on-disk PLY
/// encoding and must not change.
enum class SemanticClass : std::uint8_t {
  Unlabeled = 0,
  Wall = 1,
  Roof = 2,
  Ground = 3,
  Window = 4,
  Door = 5,
};

inline constexpr std::size_t kSemanticClassCount = 6;

std::string_view to_string(SemanticClass c);
std::optional<SemanticClass> parse_semantic_class(std::string_view name);
std::optional<SemanticClass> semantic_class_from_code(std::uint8_t code);

inline constexpr std::uint32_t kNoId = std::numeric_limits<std::uint32_t>::max();

/// Point positions with optional per-point attributes.
///
/// Attribute vectors are either empty or exactly as long as `points`.
/// A NaN intensity marks a point that carries no intensity (e.g. never seen
/// by a thermal frame). Object ids are interned: `ids[i]` indexes
/// `id_names`, and `kNoId` means the point has no id.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<float> intensity;
  std::vector<SemanticClass> labels;
  std::vector<std::uint32_t> ids;
  std::vector<std::string> id_names;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  bool has_intensity() const noexcept { return !intensity.empty(); }
  bool has_labels() const noexcept { return !labels.empty(); }
  bool has_ids() const noexcept { return !ids.empty(); }

  bool point_has_intensity(std::size_t i) const noexcept {
    return has_intensity() && intensity[i] == intensity[i];
  }

  std::string_view id(std::size_t i) const noexcept {
    if (!has_ids() || ids[i] == kNoId) return {};
    return id_names[ids[i]];
  }

  /// Returns the index of `name` in `id_names`, appending it when absent.
  std::uint32_t intern_id(std::string_view name);

  /// Throws Error(InvalidParameter) when an invariant is violated.
  void validate() const;
};

/// Extracts the positions of `indices` (attributes included).
PointCloud select(const PointCloud& cloud, const std::vector<std::size_t>& indices);

/// Infinite plane n·x = offset with the inliers that produced it.
struct Plane {
  Vector3 normal = Vector3::UnitZ();
  double offset = 0.0;
  Point3 centroid = Point3::Zero();
  std::vector<std::size_t> inlier_indices;

  double signed_distance(const Point3& p) const { return normal.dot(p) - offset; }
};

Point3 centroid(const std::vector<Point3>& points);

}  // namespace thermalign
