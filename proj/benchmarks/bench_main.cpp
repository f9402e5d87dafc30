#include <benchmark/benchmark.h>

#include <random>

#include "thermalign/fpfh.hpp"
#include "thermalign/icp.hpp"
#include "thermalign/kdtree.hpp"
#include "thermalign/metrics.hpp"
#include "thermalign/normals.hpp"
#include "thermalign/sampling.hpp"
#include "thermalign/synth.hpp"

using namespace thermalign;

namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  PointCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.points.emplace_back(u(rng), u(rng), u(rng));
  return c;
}

const PointCloud& facade_cloud() {
  static const PointCloud c = sample_model(synthetic_facade_model(SyntheticSceneSpec{}), {0.1});
  return c;
}

void BM_KdTreeBuild(benchmark::State& state) {
  const PointCloud c = random_cloud(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_index(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->Arg(10'000)->Arg(100'000);

void BM_KdTreeNearest(benchmark::State& state) {
  const PointCloud c = random_cloud(static_cast<std::size_t>(state.range(0)), 2);
  const SpatialIndex index = build_index(c);
  const PointCloud queries = random_cloud(1000, 3);
  for (auto _ : state) {
    for (const auto& q : queries.points) benchmark::DoNotOptimize(index.nearest(q));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_KdTreeNearest)->Arg(10'000)->Arg(100'000);

void BM_EvaluateRegistration(benchmark::State& state) {
  const PointCloud& c = facade_cloud();
  const SpatialIndex index = build_index(c);
  const RigidTransform t = RigidTransform::from_translation({0.03, 0.0, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_registration(c, c, index, t, 2.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.size()));
}
BENCHMARK(BM_EvaluateRegistration)->Unit(benchmark::kMillisecond);

void BM_Normals(benchmark::State& state) {
  const PointCloud& c = facade_cloud();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_normals(c, 0.3, 5, Point3(7, -10, 2)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.size()));
}
BENCHMARK(BM_Normals)->Unit(benchmark::kMillisecond);

void BM_Fpfh(benchmark::State& state) {
  PointCloud c;
  const PointCloud& full = facade_cloud();
  for (std::size_t i = 0; i < full.size(); i += 4) c.points.push_back(full.points[i]);
  const NormalCloud n = estimate_normals(c, 0.5, 5, Point3(7, -10, 2));
  for (auto _ : state) benchmark::DoNotOptimize(compute_fpfh(c, n, 1.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.size()));
}
BENCHMARK(BM_Fpfh)->Unit(benchmark::kMillisecond);

void BM_IcpPointToPlane(benchmark::State& state) {
  const PointCloud& target = facade_cloud();
  const SpatialIndex index = build_index(target);
  const NormalCloud normals = estimate_normals(target, index, 0.3, 5, Point3(7, -10, 2));
  PointCloud source;
  for (std::size_t i = 0; i < target.size(); i += 3) source.points.push_back(target.points[i]);
  const RigidTransform init = RigidTransform::from_axis_angle(Vector3::UnitZ(), 0.02, Vector3(0.2, -0.1, 0.05));
  IcpParams params;
  params.rmse_threshold = 1e-4;
  params.max_iterations = 10;
  for (auto _ : state) benchmark::DoNotOptimize(icp_point_to_plane(source, target, index, normals, init, params));
}
BENCHMARK(BM_IcpPointToPlane)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
