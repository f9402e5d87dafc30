#include "thermalign/metrics.hpp"

#include <algorithm>
#include <vector>

#include "thermalign/error.hpp"
#include "thermalign/parallel.hpp"

namespace thermalign {

RegistrationMetrics evaluate_registration(const PointCloud& source, const PointCloud& target,
                                          const RigidTransform& t, double threshold) {
  if (target.empty()) throw Error(ErrorCode::EmptyInput, "evaluate_registration: empty target");
  return evaluate_registration(source, target, build_index(target), t, threshold);
}

RegistrationMetrics evaluate_registration(const PointCloud& source, const PointCloud& target,
                                          const SpatialIndex& target_index,
                                          const RigidTransform& t, double threshold,
                                          std::vector<std::size_t>* inliers) {
  if (source.empty() || target.empty()) {
    throw Error(ErrorCode::EmptyInput, "evaluate_registration: empty cloud");
  }
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "evaluate_registration: threshold must be positive");
  }
  t.validate();

  const auto n = static_cast<std::ptrdiff_t>(source.size());
  std::vector<double> dist(source.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    dist[i] = target_index.nearest(t.apply(source.points[i])).distance;
  }

  // Sequential reduction keeps the sum order fixed.
  RegistrationMetrics m;
  double sum_sq = 0.0;
  if (inliers) inliers->clear();
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double d = dist[i];
    if (d <= threshold) {
      if (inliers) inliers->push_back(i);
      ++m.inlier_count;
      sum_sq += d * d;
    }
  }
  m.fitness = std::min(1.0, static_cast<double>(m.inlier_count) / static_cast<double>(target.size()));
  if (m.inlier_count > 0) m.rmse = std::sqrt(sum_sq / static_cast<double>(m.inlier_count));
  return m;
}

}  // namespace thermalign
