#include "thermalign/matching.hpp"

#include <algorithm>
#include <random>

#include "thermalign/error.hpp"
#include "thermalign/kdtree.hpp"
#include "thermalign/parallel.hpp"

namespace thermalign {
namespace {

using FeatureTree = KdTree<kFpfhDimension>;

struct ValidSet {
  std::vector<FpfhDescriptor> features;
  std::vector<std::size_t> original;
};

ValidSet valid_descriptors(const FpfhResult& desc) {
  ValidSet out;
  for (std::size_t i = 0; i < desc.descriptors.size(); ++i) {
    if (!desc.valid.empty() && desc.valid[i] == 0) continue;
    out.features.push_back(desc.descriptors[i]);
    out.original.push_back(i);
  }
  return out;
}

std::vector<std::size_t> nearest_all(const ValidSet& queries, const FeatureTree& tree) {
  std::vector<std::size_t> out(queries.features.size());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = tree.nearest(queries.features[i]).index;
  return out;
}

}  // namespace

CorrespondenceSet mutual_matches(const FpfhResult& source, const FpfhResult& target) {
  if (source.descriptors.empty() || target.descriptors.empty()) {
    throw Error(ErrorCode::EmptyInput, "feature matching needs non-empty descriptor sets");
  }
  const ValidSet src = valid_descriptors(source);
  const ValidSet tgt = valid_descriptors(target);
  if (src.features.empty() || tgt.features.empty()) return {};
  const FeatureTree src_tree(std::span<const FpfhDescriptor>(src.features));
  const FeatureTree tgt_tree(std::span<const FpfhDescriptor>(tgt.features));
  const auto src_to_tgt = nearest_all(src, tgt_tree);
  const auto tgt_to_src = nearest_all(tgt, src_tree);

  CorrespondenceSet out;
  for (std::size_t i = 0; i < src_to_tgt.size(); ++i) {
    const std::size_t j = src_to_tgt[i];
    if (tgt_to_src[j] == i) out.emplace_back(src.original[i], tgt.original[j]);
  }
  return out;
}

CorrespondenceSet tuple_filter(std::span<const Point3> source_points, std::span<const Point3> target_points,
                               const CorrespondenceSet& candidates, const MatchParams& params) {
  if (!(params.tuple_scale > 0.0 && params.tuple_scale < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "tuple scale must lie in (0, 1)");
  }
  CorrespondenceSet out;
  const std::size_t n = candidates.size();
  if (n < 3) return out;

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const double tau = params.tuple_scale;
  const auto consistent = [tau](double ls, double lt) { return ls * tau < lt && lt < ls / tau; };

  const std::size_t trials = n * params.tuple_trials_per_correspondence;
  std::size_t tuples = 0;
  for (std::size_t t = 0; t < trials && tuples < params.max_tuples; ++t) {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    const std::size_t c = pick(rng);
    if (a == b || b == c || a == c) continue;
    const auto& ca = candidates[a];
    const auto& cb = candidates[b];
    const auto& cc = candidates[c];
    const double s0 = (source_points[ca.first] - source_points[cb.first]).norm();
    const double s1 = (source_points[cb.first] - source_points[cc.first]).norm();
    const double s2 = (source_points[cc.first] - source_points[ca.first]).norm();
    const double t0 = (target_points[ca.second] - target_points[cb.second]).norm();
    const double t1 = (target_points[cb.second] - target_points[cc.second]).norm();
    const double t2 = (target_points[cc.second] - target_points[ca.second]).norm();
    if (consistent(s0, t0) && consistent(s1, t1) && consistent(s2, t2)) {
      out.push_back(ca);
      out.push_back(cb);
      out.push_back(cc);
      ++tuples;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CorrespondenceSet match_features(const PointCloud& source, const FpfhResult& source_desc, const PointCloud& target,
                                 const FpfhResult& target_desc, const MatchParams& params) {
  const CorrespondenceSet mutual = mutual_matches(source_desc, target_desc);
  CorrespondenceSet kept = tuple_filter(source.points, target.points, mutual, params);
  if (kept.empty()) {
    throw Error(ErrorCode::NoCorrespondence,
                "no correspondence survived the reciprocity and tuple tests (" + std::to_string(mutual.size()) +
                    " mutual matches)");
  }
  return kept;
}

}  // namespace thermalign
