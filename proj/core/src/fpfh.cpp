#include "thermalign/fpfh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "thermalign/error.hpp"
#include "thermalign/parallel.hpp"

namespace thermalign {
namespace {

using Spfh = FpfhDescriptor;

int bin_of(double value, double lo, double hi) {
  const int b = static_cast<int>(std::floor(kFpfhBinsPerFeature * (value - lo) / (hi - lo)));
  return std::clamp(b, 0, kFpfhBinsPerFeature - 1);
}

}  // namespace

std::optional<PairFeature> compute_pair_feature(const Point3& p1, const Vector3& n1, const Point3& p2,
                                                const Vector3& n2) {
  Vector3 dp = p2 - p1;
  PairFeature f;
  f.distance = dp.norm();
  if (f.distance == 0.0) return std::nullopt;

  Vector3 source_n = n1;
  Vector3 target_n = n2;
  const double angle1 = n1.dot(dp) / f.distance;
  const double angle2 = n2.dot(dp) / f.distance;
  // The point whose normal is closer to the connecting line acts as source.
  if (std::acos(std::abs(angle1)) > std::acos(std::abs(angle2))) {
    source_n = n2;
    target_n = n1;
    dp = -dp;
    f.phi = -angle2;
  } else {
    f.phi = angle1;
  }

  Vector3 v = dp.cross(source_n);
  const double v_norm = v.norm();
  if (v_norm == 0.0) return std::nullopt;
  v /= v_norm;
  const Vector3 w = source_n.cross(v);
  f.alpha = v.dot(target_n);
  f.theta = std::atan2(w.dot(target_n), source_n.dot(target_n));
  return f;
}

FpfhResult compute_fpfh(const PointCloud& cloud, const NormalCloud& normals, double radius) {
  if (cloud.empty()) return {};
  return compute_fpfh(cloud, build_index(cloud), normals, radius);
}

FpfhResult compute_fpfh(const PointCloud& cloud, const SpatialIndex& index, const NormalCloud& normals,
                        double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidParameter, "feature radius must be positive");
  if (normals.size() != cloud.size()) {
    throw Error(ErrorCode::InvalidParameter, "normal count does not match the cloud");
  }
  const std::size_t n = cloud.size();
  const auto count = static_cast<std::ptrdiff_t>(n);

  // Neighbourhoods are reused by both passes.
  std::vector<std::vector<SpatialIndex::Neighbor>> neighborhoods(n);
  std::vector<Spfh> spfh(n, Spfh::Zero());

#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    auto& nbrs = neighborhoods[i];
    index.radius_search(cloud.points[i], radius, nbrs);
    if (!normals.is_valid(i)) continue;

    Spfh hist = Spfh::Zero();
    int used = 0;
    for (const auto& nb : nbrs) {
      if (nb.index == static_cast<std::size_t>(i) || !normals.is_valid(nb.index)) continue;
      const auto f = compute_pair_feature(cloud.points[i], normals.normals[i], cloud.points[nb.index],
                                          normals.normals[nb.index]);
      if (!f) continue;
      hist(bin_of(f->theta, -std::numbers::pi, std::numbers::pi)) += 1.0;
      hist(kFpfhBinsPerFeature + bin_of(f->alpha, -1.0, 1.0)) += 1.0;
      hist(2 * kFpfhBinsPerFeature + bin_of(f->phi, -1.0, 1.0)) += 1.0;
      ++used;
    }
    if (used > 0) spfh[i] = hist * (100.0 / used);
  }

  FpfhResult out;
  out.descriptors.assign(n, FpfhDescriptor::Zero());
  out.valid.assign(n, 0);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    if (!normals.is_valid(i)) continue;
    FpfhDescriptor acc = FpfhDescriptor::Zero();
    for (const auto& nb : neighborhoods[i]) {
      if (nb.index == static_cast<std::size_t>(i) || nb.distance == 0.0) continue;
      acc += spfh[nb.index] / (nb.distance * nb.distance);
    }
    bool ok = true;
    for (int block = 0; block < 3; ++block) {
      auto seg = acc.segment<kFpfhBinsPerFeature>(block * kFpfhBinsPerFeature);
      const double sum = seg.sum();
      if (sum > 0.0) {
        seg *= 100.0 / sum;
      } else {
        ok = false;
      }
    }
    if (!ok) continue;
    out.descriptors[i] = acc;
    out.valid[i] = 1;
  }
  return out;
}

}  // namespace thermalign
