#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "thermalign/error.hpp"
#include "thermalign/fgr.hpp"
#include "thermalign/fpfh.hpp"
#include "thermalign/matching.hpp"
#include "thermalign/normals.hpp"
#include "thermalign/sampling.hpp"
#include "thermalign/synth.hpp"

using namespace thermalign;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

PointCloud cloud_of(std::vector<Point3> pts) {
  PointCloud c;
  c.points = std::move(pts);
  return c;
}

// Scene with a fixed 20 deg / (5, 2, 0) offset and clutter at 20% of the scan.
struct Scene {
  SyntheticScene scene;
  PointCloud model_points;
  FgrParams params;
};

const Scene& facade_scene() {
  static const Scene s = [] {
    SyntheticSceneSpec spec;
    spec.scan_rate = 0.1;
    spec.seed = 5;
    spec.gt_transform = RigidTransform::from_axis_angle(Vector3::UnitZ(), 20 * kDeg, Vector3(5, 2, 0));
    Scene out;
    spec.clutter_points = 0;
    const std::size_t clean = generate_scene(spec).scan.size();
    spec.clutter_points = clean / 4;  // 20% of the final scan
    out.scene = generate_scene(spec);
    out.model_points = sample_model(out.scene.model, {0.1});
    out.params.source_viewpoint = out.scene.scanner_scan;
    out.params.target_viewpoint = out.scene.scanner_model;
    return out;
  }();
  return s;
}

}  // namespace

TEST(Normals, PlaneGivesVerticalNormals) {
  std::vector<Point3> pts;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) pts.emplace_back(0.1 * i, 0.1 * j, 0.0);
  }
  const NormalCloud n = estimate_normals(cloud_of(pts), 0.25, 5, Point3(0, 0, 5));
  ASSERT_EQ(n.size(), pts.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    ASSERT_TRUE(n.is_valid(i));
    EXPECT_LT((n.normals[i] - Vector3::UnitZ()).norm(), 1e-6);
  }
}

TEST(Normals, SphereNormalsAreRadial) {
  std::vector<Point3> pts;
  const int count = 4000;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double r = std::sqrt(1 - z * z);
    pts.emplace_back(r * std::cos(golden * k), r * std::sin(golden * k), z);
  }
  const NormalCloud n = estimate_normals(cloud_of(pts), 0.15, 5, Point3(0, 0, 0));
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ASSERT_TRUE(n.is_valid(i));
    EXPECT_NEAR(n.normals[i].norm(), 1.0, 1e-6);
    // Oriented toward the centre, so the analytic normal is -p.
    worst = std::max(worst, std::acos(std::clamp(n.normals[i].dot(-pts[i].normalized()), -1.0, 1.0)));
  }
  EXPECT_LT(worst, 2 * kDeg);
}

TEST(Normals, IsolatedPointIsInvalid) {
  const NormalCloud n = estimate_normals(cloud_of({Point3(0, 0, 0), Point3(0.1, 0, 0), Point3(0, 0.1, 0),
                                                   Point3(0.1, 0.1, 0.01), Point3(50, 50, 50)}),
                                         0.3, 3);
  EXPECT_TRUE(n.is_valid(0));
  EXPECT_FALSE(n.is_valid(4));
  EXPECT_EQ(n.normals[4], Vector3::Zero());
}

TEST(Fpfh, MatchesBruteForceOnToyCloud) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point3> pts;
  NormalCloud normals;
  for (int i = 0; i < 10; ++i) {
    pts.emplace_back(u(rng), u(rng), u(rng));
    normals.normals.push_back(Vector3(u(rng), u(rng), u(rng)).normalized());
    normals.valid.push_back(1);
  }
  const double radius = 1.2;
  const FpfhResult got = compute_fpfh(cloud_of(pts), normals, radius);
  const auto want = oracle::brute_fpfh(pts, normals.normals, radius);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ASSERT_EQ(want[i].size(), static_cast<std::size_t>(kFpfhDimension));
    for (int b = 0; b < kFpfhDimension; ++b) EXPECT_NEAR(got.descriptors[i][b], want[i][b], 1e-9) << i << "/" << b;
  }
}

TEST(Fpfh, PairFeatureMatchesDarbouxOracle) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 200; ++k) {
    const Point3 p1(u(rng), u(rng), u(rng)), p2(u(rng), u(rng), u(rng));
    const Vector3 n1 = Vector3(u(rng), u(rng), u(rng)).normalized();
    const Vector3 n2 = Vector3(u(rng), u(rng), u(rng)).normalized();
    const auto got = compute_pair_feature(p1, n1, p2, n2);
    const auto want = oracle::darboux_angles(p1, n1, p2, n2);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (!got) continue;
    EXPECT_NEAR(got->theta, want->theta, 1e-12);
    EXPECT_NEAR(got->alpha, want->alpha, 1e-12);
    EXPECT_NEAR(got->phi, want->phi, 1e-12);
  }
}

TEST(Fpfh, DeterministicAndRigidInvariant) {
  const Scene& s = facade_scene();
  // Millimetre jitter keeps grid points off exact radius boundaries.
  std::mt19937_64 rng(43);
  std::normal_distribution<double> jitter(0.0, 1e-3);
  PointCloud cloud;
  for (std::size_t i = 0; i < s.model_points.size(); i += 7) {
    cloud.points.push_back(s.model_points.points[i] + Vector3(jitter(rng), jitter(rng), jitter(rng)));
  }
  const Point3 vp(7, -30, 15);
  const FpfhResult a = compute_fpfh(cloud, estimate_normals(cloud, 0.9, 5, vp), 1.5);
  const FpfhResult b = compute_fpfh(cloud, estimate_normals(cloud, 0.9, 5, vp), 1.5);
  for (std::size_t i = 0; i < cloud.size(); ++i) EXPECT_EQ(a.descriptors[i], b.descriptors[i]);

  const RigidTransform g = oracle::random_transform(rng, 30.0);
  const PointCloud moved = apply_transform(cloud, g);
  const FpfhResult c = compute_fpfh(moved, estimate_normals(moved, 0.9, 5, g.apply(vp)), 1.5);
  double worst = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_EQ(a.valid[i], c.valid[i]);
    worst = std::max(worst, (a.descriptors[i] - c.descriptors[i]).lpNorm<1>());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Fpfh, BlocksSumToHundredAndInvalidIsZero) {
  std::vector<Point3> pts;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) pts.emplace_back(0.1 * i, 0.1 * j, 0.02 * std::sin(i + 2.0 * j));
  }
  pts.emplace_back(40, 40, 40);
  const PointCloud c = cloud_of(pts);
  const FpfhResult r = compute_fpfh(c, estimate_normals(c, 0.3, 5, Point3(0, 0, 10)), 0.5);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    ASSERT_TRUE(r.valid[i]);
    for (int blk = 0; blk < 3; ++blk) EXPECT_NEAR(r.descriptors[i].segment<11>(11 * blk).sum(), 100.0, 1e-9);
  }
  EXPECT_FALSE(r.valid.back());
  EXPECT_EQ(r.descriptors.back(), FpfhDescriptor::Zero());
}

TEST(Matching, IdenticalCloudsMatchEveryPointToItself) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0, 10);
  PointCloud c;
  FpfhResult d;
  for (int i = 0; i < 200; ++i) {
    c.points.emplace_back(u(rng), u(rng), u(rng));
    FpfhDescriptor x;
    for (int b = 0; b < kFpfhDimension; ++b) x[b] = u(rng);
    d.descriptors.push_back(x);
    d.valid.push_back(1);
  }
  const CorrespondenceSet m = mutual_matches(d, d);
  ASSERT_EQ(m.size(), 200u);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(m[i], std::make_pair(i, i));
  const CorrespondenceSet kept = match_features(c, d, c, d, MatchParams{});
  EXPECT_EQ(kept.size(), 200u);
}

TEST(Matching, TupleTestReducesPlantedOutliers) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(0, 20);
  const RigidTransform g = RigidTransform::from_axis_angle(Vector3(1, 2, 3), 0.8, Vector3(3, -1, 2));
  std::vector<Point3> src, tgt;
  for (int i = 0; i < 400; ++i) {
    src.emplace_back(u(rng), u(rng), u(rng));
    tgt.push_back(g.apply(src.back()));
  }
  CorrespondenceSet candidates;
  std::uniform_int_distribution<std::size_t> pick(0, 399);
  for (std::size_t i = 0; i < 400; ++i) candidates.emplace_back(i, i % 2 == 0 ? i : pick(rng));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  auto outlier_fraction = [](const CorrespondenceSet& s) {
    std::size_t bad = 0;
    for (const auto& [a, b] : s) bad += a != b;
    return static_cast<double>(bad) / static_cast<double>(s.size());
  };
  MatchParams params;
  params.tuple_scale = 0.9;
  const CorrespondenceSet kept = tuple_filter(src, tgt, candidates, params);
  ASSERT_FALSE(kept.empty());
  EXPECT_LT(outlier_fraction(kept), outlier_fraction(candidates));
  for (std::size_t i = 1; i < kept.size(); ++i) EXPECT_LT(kept[i - 1], kept[i]);
}

TEST(Matching, NoMutualMatchesThrows) {
  PointCloud c = cloud_of({Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0)});
  FpfhResult src, tgt;
  for (int i = 0; i < 3; ++i) {
    src.descriptors.push_back(FpfhDescriptor::Constant(i));
    src.valid.push_back(1);
    tgt.descriptors.push_back(FpfhDescriptor::Zero());
    tgt.valid.push_back(0);
  }
  try {
    match_features(c, src, c, tgt, MatchParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCorrespondence);
  }
  // Two usable pairs cannot form a tuple.
  src.valid = {1, 1, 0};
  tgt = src;
  EXPECT_THROW(match_features(c, src, c, tgt, MatchParams{}), Error);
  EXPECT_THROW(mutual_matches(FpfhResult{}, tgt), Error);
}

TEST(GemanMcClure, Properties) {
  for (double mu : {0.01, 1.0, 25.0}) {
    EXPECT_EQ(geman_mcclure(0.0, mu), 0.0);
    double prev = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double r = std::pow(10.0, -3.0 + 4.0 * k / 400.0);
      const double v = geman_mcclure(r, mu);
      EXPECT_GE(v, prev);
      prev = v;
      const double fd = oracle::central_difference([mu](double x) { return geman_mcclure(x, mu); }, r, 1e-6 * r);
      const double an = geman_mcclure_derivative(r, mu);
      EXPECT_LE(std::abs(fd - an), 1e-6 * std::abs(an)) << r;
    }
    EXPECT_NEAR(geman_mcclure(1e8, mu), mu, 1e-6 * mu);
  }
}

TEST(GemanMcClure, LineWeightMinimisesJointTerm) {
  for (double mu : {0.04, 1.0}) {
    for (double r2 : {0.0, 0.01, 0.5, 3.0}) {
      const double l = line_process_weight(r2, mu);
      auto joint = [&](double w) { return w * r2 + mu * (std::sqrt(w) - 1) * (std::sqrt(w) - 1); };
      for (double w = 0.0; w <= 1.0; w += 0.01) EXPECT_LE(joint(l), joint(w) + 1e-12);
      // At the optimum the joint term equals the robust penalty.
      EXPECT_NEAR(joint(l), geman_mcclure(std::sqrt(r2), mu), 1e-12);
    }
  }
}

TEST(LineProcess, AlternationNeverIncreasesObjective) {
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> u(-5, 5);
  std::normal_distribution<double> noise(0, 0.02);
  const RigidTransform truth = RigidTransform::from_axis_angle(Vector3(0.2, 1, 0.3), 0.4, Vector3(1, -2, 0.5));
  std::vector<Point3> src, tgt;
  CorrespondenceSet corr;
  for (std::size_t i = 0; i < 300; ++i) {
    src.emplace_back(u(rng), u(rng), u(rng));
    tgt.push_back(i % 4 == 0 ? Point3(u(rng), u(rng), u(rng))
                             : Point3(truth.apply(src.back()) + Vector3(noise(rng), noise(rng), noise(rng))));
    corr.emplace_back(i, i);
  }
  FgrParams params;
  params.max_correspondence_distance = 0.05;
  std::vector<LineProcessRecord> records;
  bool converged = false;
  const RigidTransform t = optimize_line_process(src, tgt, corr, params, &records, &converged);
  ASSERT_FALSE(records.empty());
  for (const auto& r : records) {
    EXPECT_LE(r.after_weights, r.before_weights + 1e-9);
    EXPECT_LE(r.after_step, r.after_weights + 1e-9);
  }
  const auto err = transform_error(t, truth);
  EXPECT_LT(err.translation, 0.01);
  EXPECT_LT(err.rotation_rad, 0.1 * kDeg);
  EXPECT_TRUE(t.is_valid());
}

TEST(Fgr, IdenticalCloudsGiveIdentity) {
  const Scene& s = facade_scene();
  FgrParams params = s.params;
  params.source_viewpoint = params.target_viewpoint;
  const RegistrationReport r = fgr_register(s.model_points, s.model_points, params);
  const auto err = transform_error(r.transform, RigidTransform::identity());
  EXPECT_LT(err.translation, 1e-3);
  EXPECT_LT(err.rotation_rad, 0.1 * kDeg);
  EXPECT_DOUBLE_EQ(r.fitness, 1.0);
}

TEST(Fgr, RecoversSyntheticFacadeWithClutter) {
  const Scene& s = facade_scene();
  FgrTrace trace;
  const RegistrationReport r = fgr_register(s.scene.scan, s.model_points, s.params, &trace);
  const auto err = transform_error(r.transform, s.scene.gt_transform);
  EXPECT_LT(err.translation, 0.5);
  EXPECT_LT(err.rotation_rad, 2 * kDeg);
  EXPECT_FALSE(trace.correspondences.empty());
  EXPECT_EQ(r.trace.size(), r.iterations);
}

TEST(Fgr, EquivariantUnderSourceMotion) {
  const Scene& s = facade_scene();
  const RegistrationReport base = fgr_register(s.scene.scan, s.model_points, s.params);
  std::mt19937_64 rng(47);
  const RigidTransform g = random_rigid_transform(rng, 25.0, 8.0);
  FgrParams params = s.params;
  params.source_viewpoint = g.apply(s.params.source_viewpoint);
  const RegistrationReport moved = fgr_register(apply_transform(s.scene.scan, g), s.model_points, params);
  const auto err = transform_error(compose(moved.transform, g), base.transform);
  EXPECT_LT(err.translation, 0.5);
  EXPECT_LT(err.rotation_rad, 2 * kDeg);
}

TEST(Fgr, DeterministicForFixedSeed) {
  const Scene& s = facade_scene();
  const RegistrationReport a = fgr_register(s.scene.scan, s.model_points, s.params);
  const RegistrationReport b = fgr_register(s.scene.scan, s.model_points, s.params);
  EXPECT_EQ(a.transform.rotation, b.transform.rotation);
  EXPECT_EQ(a.transform.translation, b.transform.translation);
  EXPECT_EQ(a.trace, b.trace);
}

TEST(Fgr, RejectsBadParameters) {
  FgrParams p;
  p.tuple_scale = 1.0;
  EXPECT_THROW(p.validate(), Error);
  p = FgrParams{};
  p.feature_radius = 0.1;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_THROW(fgr_register(PointCloud{}, cloud_of({Point3::Zero()}), FgrParams{}), Error);
}
