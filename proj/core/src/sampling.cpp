#include "thermalign/sampling.hpp"

#include <cmath>
#include <exception>
#include <vector>

#include "thermalign/error.hpp"
#include "thermalign/parallel.hpp"

namespace thermalign {

PointCloud sample_surface(const SemanticSurface& surface, double rate, const Eigen::Vector2d& anchor_offset) {
  if (!(rate > 0.0)) throw Error(ErrorCode::InvalidParameter, "sampling rate must be positive");
  const PlaneFrame frame = surface_plane_frame(surface);

  Ring2 outer;
  outer.reserve(surface.outer.size());
  Eigen::Vector2d lo = frame.to_uv(surface.outer.front());
  Eigen::Vector2d hi = lo;
  for (const auto& p : surface.outer) {
    outer.push_back(frame.to_uv(p));
    lo = lo.cwiseMin(outer.back());
    hi = hi.cwiseMax(outer.back());
  }
  std::vector<Ring2> holes;
  for (const auto& hole : surface.holes) {
    Ring2& h = holes.emplace_back();
    for (const auto& p : hole) h.push_back(frame.to_uv(p));
  }

  const Eigen::Vector2d offset(std::fmod(std::fmod(anchor_offset.x(), rate) + rate, rate),
                               std::fmod(std::fmod(anchor_offset.y(), rate) + rate, rate));
  const Eigen::Vector2d start = lo + offset;
  const auto count = [&](double extent) -> long {
    if (extent < 0.0) return 0;
    return static_cast<long>(std::floor(extent / rate + 1e-9)) + 1;
  };
  const long nu = count(hi.x() - start.x());
  const long nv = count(hi.y() - start.y());

  PointCloud out;
  const std::uint32_t id = out.intern_id(surface.id);
  for (long j = 0; j < nv; ++j) {
    for (long i = 0; i < nu; ++i) {
      const Eigen::Vector2d uv(start.x() + static_cast<double>(i) * rate,
                               start.y() + static_cast<double>(j) * rate);
      if (!point_in_polygon(uv, outer, holes)) continue;
      out.points.push_back(frame.to_world(uv));
    }
  }
  out.labels.assign(out.points.size(), surface.label);
  out.ids.assign(out.points.size(), id);
  return out;
}

PointCloud sample_model(const BuildingModel& model, const SamplingParams& params) {
  if (!(params.rate > 0.0)) throw Error(ErrorCode::InvalidParameter, "sampling rate must be positive");
  model.validate();

  const auto n = static_cast<std::ptrdiff_t>(model.surfaces.size());
  std::vector<PointCloud> parts(model.surfaces.size());
  std::vector<std::exception_ptr> errors(model.surfaces.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    try {
      parts[s] = sample_surface(model.surfaces[s], params.rate);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  PointCloud out;
  for (const auto& s : model.surfaces) out.intern_id(s.id);
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.points.reserve(total);
  out.labels.reserve(total);
  out.ids.reserve(total);
  for (std::size_t s = 0; s < parts.size(); ++s) {
    out.points.insert(out.points.end(), parts[s].points.begin(), parts[s].points.end());
    out.labels.insert(out.labels.end(), parts[s].labels.begin(), parts[s].labels.end());
    out.ids.insert(out.ids.end(), parts[s].size(), static_cast<std::uint32_t>(s));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyOutput, "model sampling produced no points");
  return out;
}

}  // namespace thermalign
