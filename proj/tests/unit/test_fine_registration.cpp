#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "oracles.hpp"
#include "thermalign/error.hpp"
#include "thermalign/fgr.hpp"
#include "thermalign/fine_registration.hpp"
#include "thermalign/icp.hpp"
#include "thermalign/normals.hpp"
#include "thermalign/ransac.hpp"
#include "thermalign/sampling.hpp"
#include "thermalign/synth.hpp"

using namespace thermalign;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

PointCloud grid_wall(Point3 origin, Vector3 a, Vector3 b, int na, int nb, double step) {
  PointCloud c;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) c.points.push_back(origin + i * step * a + j * step * b);
  }
  return c;
}

PointCloud concat(const PointCloud& a, const PointCloud& b) {
  PointCloud c = a;
  c.points.insert(c.points.end(), b.points.begin(), b.points.end());
  return c;
}

PointCloud shifted(const PointCloud& c, const Vector3& d) {
  return apply_transform(c, RigidTransform::from_translation(d));
}

// Box-like scene: facade in y = 0, side wall in x = 0, ground in z = 0.
PointCloud box_scene() {
  PointCloud facade = grid_wall(Point3(0.5, 0, 0.5), Vector3::UnitX(), Vector3::UnitZ(), 100, 40, 0.1);
  PointCloud side = grid_wall(Point3(0, 0.5, 0.5), Vector3::UnitY(), Vector3::UnitZ(), 40, 40, 0.1);
  PointCloud ground = grid_wall(Point3(0.5, -4, 0), Vector3::UnitX(), Vector3::UnitY(), 100, 30, 0.1);
  return concat(concat(facade, side), ground);
}

std::pair<Plane, Plane> main_planes(const PointCloud& src, const PointCloud& tgt) {
  RansacParams rp;
  const auto a = select_main_plane(ransac_plane(src, rp));
  const auto b = select_main_plane(ransac_plane(tgt, rp));
  EXPECT_TRUE(a && b);
  return {*a, *b};
}

struct IcpScene {
  SyntheticScene scene;
  PointCloud target;
  SpatialIndex index;
  NormalCloud normals;
};

const IcpScene& icp_scene() {
  static const IcpScene s = [] {
    SyntheticSceneSpec spec;
    spec.scan_rate = 0.1;
    spec.seed = 8;
    spec.gt_transform = RigidTransform::from_axis_angle(Vector3(0.1, 0.2, 1), 12 * kDeg, Vector3(2, -3, 0.5));
    IcpScene out;
    out.scene = generate_scene(spec);
    out.target = sample_model(out.scene.model, {0.04});
    out.index = build_index(out.target);
    out.normals = estimate_normals(out.target, out.index, 0.3, 5, out.scene.scanner_model);
    return out;
  }();
  return s;
}

}  // namespace

TEST(Ransac, RecoversPlaneAmongOutliers) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0, 10);
  PointCloud c;
  std::vector<Point3> inliers;
  for (int i = 0; i < 1000; ++i) {
    c.points.emplace_back(u(rng), u(rng), 3.0);
    inliers.push_back(c.points.back());
  }
  for (int i = 0; i < 50; ++i) c.points.emplace_back(u(rng), u(rng), u(rng));
  RansacParams p;
  p.plane_count = 1;
  const auto planes = ransac_plane(c, p);
  ASSERT_EQ(planes.size(), 1u);
  const Plane& pl = planes[0];
  const double sign = pl.normal.z() < 0 ? -1.0 : 1.0;
  EXPECT_LT(std::acos(std::min(1.0, sign * pl.normal.z())), 0.5 * kDeg);
  EXPECT_NEAR(sign * pl.offset, 3.0, 1e-3);
  const auto fit = oracle::svd_plane(inliers);
  EXPECT_NEAR(std::abs(fit.normal.dot(pl.normal)), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(pl.normal.norm()), 1.0, 1e-9);
}

TEST(Ransac, CollinearPointsHaveNoPlane) {
  PointCloud c;
  for (int i = 0; i < 100; ++i) c.points.emplace_back(0.1 * i, 0.2 * i, -0.05 * i);
  try {
    ransac_plane(c, RansacParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoPlane);
  }
}

TEST(Ransac, TwoOrthogonalWallsAreSeparated) {
  const PointCloud a = grid_wall(Point3(1, 0, 0), Vector3::UnitX(), Vector3::UnitZ(), 30, 30, 0.1);
  const PointCloud b = grid_wall(Point3(0, 1, 0), Vector3::UnitY(), Vector3::UnitZ(), 30, 30, 0.1);
  const PointCloud c = concat(a, b);
  RansacParams p;
  p.plane_count = 2;
  const auto planes = ransac_plane(c, p);
  ASSERT_EQ(planes.size(), 2u);
  std::set<std::size_t> seen;
  for (const auto& pl : planes) {
    ASSERT_EQ(pl.inlier_indices.size(), 900u);
    // Membership is either exactly wall a (indices < 900) or exactly wall b.
    const bool first = pl.inlier_indices.front() < 900;
    for (auto i : pl.inlier_indices) {
      EXPECT_EQ(i < 900, first);
      EXPECT_TRUE(seen.insert(i).second);
      EXPECT_LE(std::abs(pl.signed_distance(c.points[i])), p.distance_threshold);
    }
  }
}

TEST(Ransac, InliersWithinThresholdAndReproducible) {
  const PointCloud c = box_scene();
  const RansacParams p;
  const auto a = ransac_plane(c, p);
  const auto b = ransac_plane(c, p);
  ASSERT_EQ(a.size(), b.size());
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].inlier_indices, b[k].inlier_indices);
    EXPECT_EQ(a[k].normal, b[k].normal);
    if (k > 0) EXPECT_GE(a[k - 1].inlier_indices.size(), a[k].inlier_indices.size());
    for (auto i : a[k].inlier_indices) {
      EXPECT_LE(std::abs(a[k].signed_distance(c.points[i])), p.distance_threshold);
      EXPECT_TRUE(seen.insert(i).second);
    }
  }
}

TEST(Rectify, PureHeightOffset) {
  const PointCloud tgt = box_scene();
  const PointCloud src = shifted(tgt, {0, 0, 2});
  const auto [ps, pt] = main_planes(src, tgt);
  const RectifyResult r = rectify(src, ps, tgt, pt);
  ASSERT_FALSE(r.skipped);
  EXPECT_NEAR(r.transform.translation.z(), -2.0, 1e-6);
  EXPECT_NEAR(r.transform.translation.head<2>().norm(), 0.0, 1e-6);
  EXPECT_EQ(r.transform.rotation, Eigen::Matrix3d::Identity());
}

TEST(Rectify, OffsetAlongFacadeNormal) {
  // Facade in x = 0 facing -x; the source sits 3 m further along +x.
  PointCloud tgt = grid_wall(Point3(0, 0, 0), Vector3::UnitY(), Vector3::UnitZ(), 120, 60, 0.1);
  tgt = concat(tgt, grid_wall(Point3(-4, 0, 0), Vector3::UnitX(), Vector3::UnitY(), 35, 120, 0.1));
  const PointCloud src = shifted(tgt, {3, 0, 0});
  const auto [ps, pt] = main_planes(src, tgt);
  const RectifyResult r = rectify(src, ps, tgt, pt);
  ASSERT_FALSE(r.skipped);
  EXPECT_LT((r.transform.translation - Vector3(-3, 0, 0)).norm(), 1e-6);
}

TEST(Rectify, SyntheticFacadeOffset) {
  SyntheticSceneSpec spec;
  spec.scan_rate = 0.1;
  spec.seed = 9;
  const Vector3 offset(1.5, -0.7, 0.4);
  spec.gt_transform = RigidTransform::from_translation(-offset);  // scan = model + offset
  const SyntheticScene scene = generate_scene(spec);
  const double rate = 0.1;
  const PointCloud model = sample_model(scene.model, {rate});
  const auto [ps, pt] = main_planes(scene.scan, model);
  const RectifyResult r = rectify(scene.scan, ps, model, pt);
  ASSERT_FALSE(r.skipped);
  const Vector3 residual = offset + r.transform.translation;
  // Facade normal is along y, so y and z are the rectified components.
  EXPECT_LT(std::abs(residual.y()), 2 * rate);
  EXPECT_LT(std::abs(residual.z()), 2 * rate);
}

TEST(Rectify, HorizontalMainPlaneIsSkipped) {
  const PointCloud ground = grid_wall(Point3(0, 0, 0), Vector3::UnitX(), Vector3::UnitY(), 50, 50, 0.1);
  const auto planes = ransac_plane(ground, RansacParams{});
  EXPECT_FALSE(select_main_plane(planes));
  const RectifyResult r = rectify(ground, planes[0], ground, planes[0]);
  EXPECT_TRUE(r.skipped);
  EXPECT_FALSE(r.warning.empty());
  EXPECT_EQ(r.transform.translation, Vector3::Zero());
}

TEST(HeightPercentile, LinearInterpolation) {
  PointCloud c;
  for (int i = 0; i <= 100; ++i) c.points.emplace_back(0, 0, static_cast<double>(100 - i));
  EXPECT_DOUBLE_EQ(height_percentile(c, 5.0), 5.0);
  EXPECT_DOUBLE_EQ(height_percentile(c, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(height_percentile(c, 100.0), 100.0);
  EXPECT_DOUBLE_EQ(height_percentile(c, 2.5), 2.5);
}

TEST(Icp, IdenticalCloudsConvergeImmediately) {
  const PointCloud c = box_scene();
  const NormalCloud n = estimate_normals(c, 0.3, 5, Point3(5, -20, 5));
  std::vector<IcpIteration> diag;
  const RegistrationReport r = icp_point_to_plane(c, c, n, RigidTransform::identity(), IcpParams{}, &diag);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_EQ(r.fitness, 1.0);
  EXPECT_EQ(r.trace.size(), 1u);
}

TEST(Icp, RecoversPerturbedScene) {
  const IcpScene& s = icp_scene();
  const RigidTransform gt = s.scene.gt_transform;
  const RigidTransform perturb = RigidTransform::from_axis_angle(Vector3(1, -2, 0.5), 3 * kDeg, Vector3(0.3, 0, 0));
  const RigidTransform init = compose(perturb, gt);
  IcpParams params;
  params.rmse_threshold = 0.01;  // run to the cap so the estimate settles
  params.max_iterations = 30;
  std::vector<IcpIteration> diag;
  const RegistrationReport r = icp_point_to_plane(s.scene.scan, s.target, s.index, s.normals, init, params, &diag);
  const auto err = transform_error(r.transform, gt);
  EXPECT_LT(err.translation, 0.02);
  EXPECT_LT(err.rotation_rad, 0.2 * kDeg);
  EXPECT_TRUE(r.transform.is_valid());
  ASSERT_FALSE(r.trace.empty());
  // Point-to-plane RMSE, which is what convergence is judged on.
  EXPECT_LT(r.trace.back(), 1.5 * 0.02);
  EXPECT_EQ(r.trace.size(), r.iterations);
  EXPECT_LE(r.iterations, params.max_iterations);
  EXPECT_EQ(r.converged, r.trace.back() <= params.rmse_threshold);
  for (const auto& d : diag) EXPECT_LE(d.linearized_after, d.linearized_before + 1e-9);
}

TEST(Icp, DivergenceCarriesLastTransform) {
  const PointCloud c = box_scene();
  const NormalCloud n = estimate_normals(c, 0.3, 5, Point3(5, -20, 5));
  const RigidTransform far = RigidTransform::from_translation({100, 0, 0});
  IcpParams p;
  p.max_correspondence_distance = 1.0;
  try {
    icp_point_to_plane(c, c, n, far, p);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::Divergence);
    EXPECT_EQ(e.last_transform().translation, far.translation);
  }
}

TEST(Icp, ReproducibleReports) {
  const IcpScene& s = icp_scene();
  const RigidTransform init = compose(RigidTransform::from_translation({0.1, 0.1, 0}), s.scene.gt_transform);
  const auto a = icp_point_to_plane(s.scene.scan, s.target, s.index, s.normals, init, IcpParams{});
  const auto b = icp_point_to_plane(s.scene.scan, s.target, s.index, s.normals, init, IcpParams{});
  EXPECT_EQ(a.transform.rotation, b.transform.rotation);
  EXPECT_EQ(a.transform.translation, b.transform.translation);
  EXPECT_EQ(a.trace, b.trace);
}

TEST(RegisterFine, AlignedPairStaysAtIdentity) {
  const PointCloud c = box_scene();
  FineRegistrationDetails details;
  const RegistrationReport r = register_fine(c, c, RigidTransform::identity(), FineRegistrationParams{}, &details);
  const auto err = transform_error(r.transform, RigidTransform::identity());
  EXPECT_LT(err.translation, 1e-3);
  EXPECT_LT(err.rotation_rad, 0.05 * kDeg);
  EXPECT_FALSE(details.rectification.skipped);
}

TEST(RegisterFine, EndToEndAfterCoarse) {
  SyntheticSceneSpec spec;
  spec.scan_rate = 0.1;
  spec.seed = 10;
  spec.gt_transform = RigidTransform::from_axis_angle(Vector3::UnitZ(), -15 * kDeg, Vector3(-4, 3, 0.2));
  const SyntheticScene scene = generate_scene(spec);
  const PointCloud model = sample_model(scene.model, {0.1});
  FgrParams fgr;
  fgr.source_viewpoint = scene.scanner_scan;
  fgr.target_viewpoint = scene.scanner_model;
  const RegistrationReport coarse = fgr_register(scene.scan, model, fgr);
  const RegistrationReport fine = register_fine(scene.scan, model, coarse.transform, FineRegistrationParams{});
  const auto err = transform_error(fine.transform, scene.gt_transform);
  EXPECT_LT(err.translation, 0.1);
  EXPECT_LT(err.rotation_rad, 1 * kDeg);
}
