#include "thermalign/icp.hpp"

#include <cmath>
#include <numbers>

#include "lsq.hpp"
#include "thermalign/metrics.hpp"
#include "thermalign/parallel.hpp"

namespace thermalign {

void IcpParams::validate() const {
  if (!(max_correspondence_distance > 0.0)) throw Error(ErrorCode::InvalidParameter, "ICP d_max must be positive");
  if (!(rmse_threshold > 0.0)) throw Error(ErrorCode::InvalidParameter, "ICP t_rmse must be positive");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidParameter, "ICP t_it must be positive");
}

RegistrationReport icp_point_to_plane(const PointCloud& source, const PointCloud& target,
                                      const NormalCloud& target_normals, const RigidTransform& init,
                                      const IcpParams& params, std::vector<IcpIteration>* diagnostics) {
  if (target.empty()) throw Error(ErrorCode::EmptyInput, "icp_point_to_plane: empty target");
  return icp_point_to_plane(source, target, build_index(target), target_normals, init, params, diagnostics);
}

RegistrationReport icp_point_to_plane(const PointCloud& source, const PointCloud& target,
                                      const SpatialIndex& target_index, const NormalCloud& target_normals,
                                      const RigidTransform& init, const IcpParams& params,
                                      std::vector<IcpIteration>* diagnostics) {
  params.validate();
  init.validate();
  if (source.empty() || target.empty()) throw Error(ErrorCode::EmptyInput, "icp_point_to_plane: empty cloud");
  if (target_normals.size() != target.size()) {
    throw Error(ErrorCode::InvalidParameter, "icp_point_to_plane: target normals do not match the target cloud");
  }

  NormalCloud source_normals;
  if (params.normal_gate) {
    source_normals = estimate_normals(source, params.normal_gate_radius, 5);
  }
  const double gate_cos = std::cos(params.normal_gate_degrees * std::numbers::pi / 180.0);

  const std::size_t n = source.size();
  const auto count = static_cast<std::ptrdiff_t>(n);
  std::vector<std::size_t> match(n);
  std::vector<std::uint8_t> keep(n);

  RegistrationReport report;
  RigidTransform current = init;
  for (std::size_t iter = 0; iter < params.max_iterations; ++iter) {
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const Point3 p = current.apply(source.points[i]);
      const auto nb = target_index.nearest(p);
      match[i] = nb.index;
      bool ok = nb.distance <= params.max_correspondence_distance && target_normals.is_valid(nb.index);
      if (ok && params.normal_gate && source_normals.is_valid(i)) {
        const Vector3 ns = current.rotation * source_normals.normals[i];
        ok = std::abs(ns.dot(target_normals.normals[nb.index])) >= gate_cos;
      }
      keep[i] = ok ? 1 : 0;
    }

    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    std::vector<std::size_t> pairs;
    double before = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!keep[i]) continue;
      pairs.push_back(i);
      const Point3 p = current.apply(source.points[i]);
      const Point3& q = target.points[match[i]];
      const Vector3& nq = target_normals.normals[match[i]];
      const double e = (p - q).dot(nq);
      Eigen::Matrix<double, 6, 1> j;
      j << p.cross(nq), nq;
      jtj.noalias() += j * j.transpose();
      jtr.noalias() += j * e;
      before += e * e;
    }
    if (pairs.empty()) {
      throw DivergenceError("ICP iteration " + std::to_string(iter + 1) + " has no correspondence within d_max",
                            current);
    }

    const Eigen::Matrix<double, 6, 1> step = -detail::solve_normal_equations(jtj, jtr);
    // Linearised residuals at the solution: e + J step.
    double after = 0.0;
    for (auto i : pairs) {
      const Point3 p = current.apply(source.points[i]);
      const Vector3& nq = target_normals.normals[match[i]];
      Eigen::Matrix<double, 6, 1> j;
      j << p.cross(nq), nq;
      const double e = (p - target.points[match[i]]).dot(nq) + j.dot(step);
      after += e * e;
    }

    current = compose(twist_to_transform(step), current);

    double sum_sq = 0.0;
    for (auto i : pairs) {
      const double e = (current.apply(source.points[i]) - target.points[match[i]]).dot(target_normals.normals[match[i]]);
      sum_sq += e * e;
    }
    const double rmse = std::sqrt(sum_sq / static_cast<double>(pairs.size()));
    report.trace.push_back(rmse);
    if (diagnostics) diagnostics->push_back({pairs.size(), before, after, rmse});
    if (rmse <= params.rmse_threshold) {
      report.converged = true;
      break;
    }
  }

  report.transform = current;
  report.iterations = report.trace.size();
  const RegistrationMetrics metrics =
      evaluate_registration(source, target, target_index, current, params.max_correspondence_distance);
  report.fitness = metrics.fitness;
  report.rmse = metrics.rmse;
  return report;
}

}  // namespace thermalign
