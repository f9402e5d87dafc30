#include "thermalign/downsample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace thermalign {

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
  PointCloud out;
  if (!(voxel_size > 0.0)) {
    out.points = cloud.points;
    return out;
  }
  if (cloud.empty()) return out;

  Point3 lo = cloud.points.front();
  for (const auto& p : cloud.points) lo = lo.cwiseMin(p);

  struct Entry {
    std::array<std::int64_t, 3> key;
    std::size_t index;
  };
  std::vector<Entry> entries;
  entries.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vector3 rel = (cloud.points[i] - lo) / voxel_size;
    entries.push_back({{static_cast<std::int64_t>(std::floor(rel.x())), static_cast<std::int64_t>(std::floor(rel.y())),
                        static_cast<std::int64_t>(std::floor(rel.z()))},
                       i});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.index < b.index;
  });

  for (std::size_t begin = 0; begin < entries.size();) {
    std::size_t end = begin;
    Point3 sum = Point3::Zero();
    while (end < entries.size() && entries[end].key == entries[begin].key) {
      sum += cloud.points[entries[end].index];
      ++end;
    }
    out.points.push_back(sum / static_cast<double>(end - begin));
    begin = end;
  }
  return out;
}

}  // namespace thermalign
