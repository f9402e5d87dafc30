#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "thermalign/fpfh.hpp"
#include "thermalign/geometry.hpp"

namespace thermalign {

/// (source index, target index) pairs, sorted and free of duplicates.
using CorrespondenceSet = std::vector<std::pair<std::size_t, std::size_t>>;

struct MatchParams {
  /// Edge-length ratio bound of the tuple test, in (0, 1).
  double tuple_scale = 0.9;
  std::size_t max_tuples = 1000;
  /// Random triplets drawn per mutual correspondence.
  std::size_t tuple_trials_per_correspondence = 100;
  std::uint64_t seed = 42;
};

/// Mutual nearest neighbours in descriptor space. Invalid descriptors are
/// skipped on both sides; if no valid descriptor remains the set is empty.
/// Throws Error(EmptyInput) for an empty descriptor list.
CorrespondenceSet mutual_matches(const FpfhResult& source, const FpfhResult& target);

/// Keeps correspondences from random triplets whose three pairwise edge
/// lengths agree within [tau, 1/tau] between source and target.
CorrespondenceSet tuple_filter(std::span<const Point3> source_points, std::span<const Point3> target_points,
                               const CorrespondenceSet& candidates, const MatchParams& params);

/// mutual_matches followed by tuple_filter. Throws Error(NoCorrespondence)
/// when nothing survives.
CorrespondenceSet match_features(const PointCloud& source, const FpfhResult& source_desc, const PointCloud& target,
                                 const FpfhResult& target_desc, const MatchParams& params);

}  // namespace thermalign
