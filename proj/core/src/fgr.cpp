#include "thermalign/fgr.hpp"

#include <algorithm>
#include <cmath>

#include "lsq.hpp"

#include "thermalign/downsample.hpp"
#include "thermalign/error.hpp"
#include "thermalign/fpfh.hpp"
#include "thermalign/metrics.hpp"
#include "thermalign/normals.hpp"

namespace thermalign {
namespace {

constexpr std::size_t kMinPointsAfterDownsampling = 100;
constexpr int kMaxBacktracks = 12;
constexpr int kIterationsPerScale = 4;

double bbox_diagonal(std::span<const Point3> pts) {
  if (pts.empty()) return 0.0;
  Point3 lo = pts.front();
  Point3 hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

PointCloud z_filter(const PointCloud& cloud, const std::optional<std::pair<double, double>>& range) {
  if (!range) return cloud;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double z = cloud.points[i].z();
    if (z >= range->first && z <= range->second) keep.push_back(i);
  }
  return select(cloud, keep);
}

}  // namespace

double line_process_objective(std::span<const double> squared_residuals, std::span<const double> weights, double mu) {
  double e = 0.0;
  for (std::size_t k = 0; k < squared_residuals.size(); ++k) {
    const double root = std::sqrt(weights[k]) - 1.0;
    e += weights[k] * squared_residuals[k] + mu * root * root;
  }
  return e;
}

void FgrParams::validate() const {
  if (!(voxel_size >= 0.0)) throw Error(ErrorCode::InvalidParameter, "FGR voxel size must be >= 0");
  if (!(normal_radius > 0.0) || !(feature_radius > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "FGR radii must be positive");
  }
  if (feature_radius < normal_radius) {
    throw Error(ErrorCode::InvalidParameter, "FGR feature radius must be >= the normal radius");
  }
  if (!(tuple_scale > 0.0 && tuple_scale < 1.0)) throw Error(ErrorCode::InvalidParameter, "tuple scale must lie in (0,1)");
  if (max_iterations == 0) throw Error(ErrorCode::InvalidParameter, "FGR needs at least one iteration");
  if (!(division_factor > 0.0)) throw Error(ErrorCode::InvalidParameter, "FGR division factor must be positive");
  if (!(max_correspondence_distance > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "FGR max correspondence distance must be positive");
  }
  if (!(evaluation_threshold > 0.0)) throw Error(ErrorCode::InvalidParameter, "evaluation threshold must be positive");
}

RigidTransform optimize_line_process(std::span<const Point3> source, std::span<const Point3> target,
                                     const CorrespondenceSet& correspondences, const FgrParams& params,
                                     std::vector<LineProcessRecord>* records, bool* converged,
                                     std::vector<double>* rms_trace) {
  if (correspondences.empty()) throw Error(ErrorCode::NoCorrespondence, "line-process optimisation without correspondences");
  const std::size_t m = correspondences.size();

  // Work in centred coordinates so the linearised rotation is well conditioned.
  std::vector<Point3> src(m);
  std::vector<Point3> tgt(m);
  for (std::size_t k = 0; k < m; ++k) {
    src[k] = source[correspondences[k].first];
    tgt[k] = target[correspondences[k].second];
  }
  const Point3 src_center = centroid(src);
  const Point3 tgt_center = centroid(tgt);
  for (auto& p : src) p -= src_center;
  for (auto& q : tgt) q -= tgt_center;

  const double diameter = std::max(bbox_diagonal(source), bbox_diagonal(target));
  const double mu_floor = params.max_correspondence_distance * params.max_correspondence_distance;
  double mu = std::max(diameter * diameter / params.division_factor, mu_floor);

  RigidTransform current;  // maps centred source onto centred target
  std::vector<double> weights(m, 1.0);
  std::vector<double> r2(m);
  std::vector<Point3> moved(m);
  const auto residuals = [&](const RigidTransform& t, std::vector<double>& out) {
    for (std::size_t k = 0; k < m; ++k) out[k] = (t.apply(src[k]) - tgt[k]).squaredNorm();
  };

  double last_step = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < params.max_iterations; ++iter) {
    if (iter > 0 && iter % kIterationsPerScale == 0) mu = std::max(mu / 2.0, mu_floor);

    residuals(current, r2);
    LineProcessRecord rec;
    rec.mu = mu;
    rec.before_weights = line_process_objective(r2, weights, mu);
    for (std::size_t k = 0; k < m; ++k) weights[k] = line_process_weight(r2[k], mu);
    rec.after_weights = line_process_objective(r2, weights, mu);

    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    double weight_sum = 0.0;
    double weighted_sq = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const Point3 p = current.apply(src[k]);
      const Vector3 r = p - tgt[k];
      // d(p + w x p + v)/d(w, v) = [-[p]x | I]
      Eigen::Matrix<double, 3, 6> j;
      j << 0.0, p.z(), -p.y(), 1.0, 0.0, 0.0,
          -p.z(), 0.0, p.x(), 0.0, 1.0, 0.0,
          p.y(), -p.x(), 0.0, 0.0, 0.0, 1.0;
      jtj.noalias() += weights[k] * j.transpose() * j;
      jtr.noalias() += weights[k] * j.transpose() * r;
      weight_sum += weights[k];
      weighted_sq += weights[k] * r2[k];
    }
    if (rms_trace) rms_trace->push_back(weight_sum > 0.0 ? std::sqrt(weighted_sq / weight_sum) : 0.0);

    Eigen::Matrix<double, 6, 1> step = -detail::solve_normal_equations(jtj, jtr);
    if (!step.allFinite()) step.setZero();

    // Damped step: never accept an increase of the joint objective.
    RigidTransform next = current;
    double best = rec.after_weights;
    double accepted = 0.0;
    for (int b = 0; b < kMaxBacktracks && step.norm() > 0.0; ++b) {
      const RigidTransform candidate = compose(twist_to_transform(step), current);
      residuals(candidate, r2);
      const double e = line_process_objective(r2, weights, mu);
      if (e <= best) {
        next = candidate;
        best = e;
        accepted = step.norm();
        break;
      }
      step *= 0.5;
    }
    current = next;
    rec.after_step = best;
    last_step = accepted;
    if (records) records->push_back(rec);
  }

  if (converged) *converged = (mu <= mu_floor) && last_step < 1e-6;

  // Undo the centring: x -> R (x - cs) + T + ct.
  RigidTransform out;
  out.rotation = current.rotation;
  out.translation = current.translation + tgt_center - current.rotation * src_center;
  return out;
}

RegistrationReport fgr_register(const PointCloud& source, const PointCloud& target, const FgrParams& params,
                                FgrTrace* trace) {
  params.validate();
  if (source.empty() || target.empty()) throw Error(ErrorCode::EmptyInput, "fgr_register: empty cloud");

  const PointCloud src = voxel_downsample(z_filter(source, params.z_range), params.voxel_size);
  const PointCloud tgt = voxel_downsample(z_filter(target, params.z_range), params.voxel_size);
  if (src.size() < kMinPointsAfterDownsampling || tgt.size() < kMinPointsAfterDownsampling) {
    throw Error(ErrorCode::InvalidParameter,
                "fgr_register needs >= 100 points per cloud after downsampling (got " + std::to_string(src.size()) +
                    " and " + std::to_string(tgt.size()) + ")");
  }

  const SpatialIndex src_index = build_index(src);
  const SpatialIndex tgt_index = build_index(tgt);
  const NormalCloud src_normals =
      estimate_normals(src, src_index, params.normal_radius, params.normal_min_neighbors, params.source_viewpoint);
  const NormalCloud tgt_normals =
      estimate_normals(tgt, tgt_index, params.normal_radius, params.normal_min_neighbors, params.target_viewpoint);
  const FpfhResult src_desc = compute_fpfh(src, src_index, src_normals, params.feature_radius);
  const FpfhResult tgt_desc = compute_fpfh(tgt, tgt_index, tgt_normals, params.feature_radius);

  MatchParams match;
  match.tuple_scale = params.tuple_scale;
  match.max_tuples = params.max_tuples;
  match.seed = params.seed;
  const CorrespondenceSet corr = match_features(src, src_desc, tgt, tgt_desc, match);

  RegistrationReport report;
  bool converged = false;
  std::vector<LineProcessRecord> records;
  report.transform = optimize_line_process(src.points, tgt.points, corr, params, trace ? &records : nullptr,
                                           &converged, &report.trace);
  report.iterations = report.trace.size();
  report.converged = converged;

  const RegistrationMetrics metrics = evaluate_registration(source, target, report.transform, params.evaluation_threshold);
  report.fitness = metrics.fitness;
  report.rmse = metrics.rmse;

  if (trace) {
    trace->source_points = src.size();
    trace->target_points = tgt.size();
    trace->correspondences = corr;
    trace->records = std::move(records);
  }
  return report;
}

}  // namespace thermalign
