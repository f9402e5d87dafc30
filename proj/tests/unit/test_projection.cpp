#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "thermalign/error.hpp"
#include "thermalign/projection.hpp"

using namespace thermalign;

namespace {

const CameraModel kCamera{200.0, 1.0, 160.0, 128.0, 320, 256};

// Camera at the origin looking along +z.
const RigidTransform kLookZ = RigidTransform::identity();

struct Rect {
  double z;  // plane depth
  double x0, x1, y0, y1;
  SemanticClass label;
};

PointCloud sample_rects(const std::vector<Rect>& rects, double step) {
  PointCloud c;
  for (const auto& r : rects) {
    for (double x = r.x0; x <= r.x1 + 1e-9; x += step) {
      for (double y = r.y0; y <= r.y1 + 1e-9; y += step) {
        c.points.emplace_back(x, y, r.z);
        c.labels.push_back(r.label);
      }
    }
  }
  return c;
}

// Casts the ray through each pixel centre and keeps the nearest rectangle hit.
LabelImage rasterize(const std::vector<Rect>& rects, const CameraModel& cam) {
  LabelImage img;
  img.width = cam.width;
  img.height = cam.height;
  img.pixels.assign(static_cast<std::size_t>(cam.width) * cam.height, LabelImage::kBackground);
  for (int row = 0; row < cam.height; ++row) {
    for (int col = 0; col < cam.width; ++col) {
      const double dx = (col + 0.5 - cam.cx) / (cam.aspect * cam.focal);
      const double dy = (row + 0.5 - cam.cy) / cam.focal;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : rects) {
        const double x = dx * r.z, y = dy * r.z;
        if (x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1 && r.z < best) {
          best = r.z;
          img.pixels[static_cast<std::size_t>(row) * cam.width + col] = static_cast<std::uint8_t>(r.label);
        }
      }
    }
  }
  return img;
}

}  // namespace

TEST(ProjectPoint, OpticalAxisHitsPrincipalPoint) {
  const auto uv = project_point(kCamera, kLookZ, Point3(0, 0, 1));
  ASSERT_TRUE(uv);
  EXPECT_EQ(uv->x(), kCamera.cx);
  EXPECT_EQ(uv->y(), kCamera.cy);
}

TEST(ProjectPoint, BehindOrOutsideIsAbsent) {
  EXPECT_FALSE(project_point(kCamera, kLookZ, Point3(0, 0, -1)));
  EXPECT_FALSE(project_point(kCamera, kLookZ, Point3(0, 0, 0)));
  EXPECT_FALSE(project_point(kCamera, kLookZ, Point3(100, 0, 1)));
}

TEST(ProjectPoint, MatchesMatrixProduct) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-5, 5);
  CameraModel cam = kCamera;
  cam.aspect = 1.07;
  int compared = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const RigidTransform pose = oracle::random_transform(rng, 3.0);
    for (int k = 0; k < 100; ++k) {
      // Place the point in front of the camera, then map it back to world.
      const Point3 xc(u(rng), u(rng), 5 + std::abs(u(rng)) * 4);
      const Point3 x = pose.inverse().apply(xc);
      const auto got = project_point(cam, pose, x);
      const Eigen::Vector2d want = oracle::projection_matrix_product(cam, pose, x);
      const bool in_view = want.x() >= 0 && want.x() < cam.width && want.y() >= 0 && want.y() < cam.height;
      ASSERT_EQ(got.has_value(), in_view);
      if (got) {
        EXPECT_LT((*got - want).norm(), 1e-9);
        ++compared;
      }
    }
  }
  EXPECT_GT(compared, 100);
}

TEST(Colorize, ConstantImage) {
  PointCloud c;
  c.points = {Point3(0.3, -0.2, 4)};
  c.labels = {SemanticClass::Door};
  const std::vector<FramePose> frames = {{kLookZ, Image(kCamera.width, kCamera.height, 0.5f)}};
  const PointCloud out = colorize_cloud(c, kCamera, frames);
  ASSERT_TRUE(out.has_intensity());
  EXPECT_FLOAT_EQ(out.intensity[0], 0.5f);
  EXPECT_EQ(out.points, c.points);
  EXPECT_EQ(out.labels, c.labels);
}

TEST(Colorize, NearPointOccludesFarPointOnSameRay) {
  PointCloud c;
  c.points = {Point3(0.5, 0.25, 10), Point3(0.25, 0.125, 5)};
  const std::vector<FramePose> frames = {{kLookZ, Image(kCamera.width, kCamera.height, 0.7f)}};
  const PointCloud with = colorize_cloud(c, kCamera, frames);
  EXPECT_FALSE(with.point_has_intensity(0));
  EXPECT_TRUE(with.point_has_intensity(1));
  ColorizeParams off;
  off.occlusion = false;
  const PointCloud without = colorize_cloud(c, kCamera, frames, off);
  EXPECT_TRUE(without.point_has_intensity(0));
  EXPECT_TRUE(without.point_has_intensity(1));
}

TEST(Colorize, OutOfViewStaysNaN) {
  PointCloud c;
  c.points = {Point3(0, 0, -3), Point3(0, 0, 3)};
  const std::vector<FramePose> frames = {{kLookZ, Image(kCamera.width, kCamera.height, 0.2f)}};
  const PointCloud out = colorize_cloud(c, kCamera, frames);
  EXPECT_FALSE(out.point_has_intensity(0));
  EXPECT_TRUE(out.point_has_intensity(1));
}

TEST(Colorize, NoFramesIsAnError) {
  PointCloud c;
  c.points = {Point3(0, 0, 3)};
  try {
    colorize_cloud(c, kCamera, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidParameter);
  }
}

TEST(Colorize, FollowsAnalyticGradient) {
  // Column-linear image: pixel (col, row) holds col / (W - 1), so between
  // pixel centres the bilinear value is (u - 0.5) / (W - 1).
  Image img(kCamera.width, kCamera.height);
  for (int row = 0; row < img.height; ++row) {
    for (int col = 0; col < img.width; ++col) img.at(col, row) = static_cast<float>(col) / (img.width - 1);
  }
  const RigidTransform pose = RigidTransform::from_axis_angle(Vector3::UnitY(), 0.3, Vector3(0.5, 0, 8));
  PointCloud wall;
  for (double x = -6; x <= 6; x += 0.1) {
    for (double y = -4; y <= 4; y += 0.1) wall.points.emplace_back(x, y, 0.0);
  }
  const std::vector<FramePose> frames = {{pose, img}};
  const PointCloud out = colorize_cloud(wall, kCamera, frames);
  int checked = 0;
  for (std::size_t i = 0; i < wall.size(); ++i) {
    const Eigen::Vector2d uv = oracle::projection_matrix_product(kCamera, pose, wall.points[i]);
    if (uv.x() < 0.5 || uv.x() > img.width - 0.5 || uv.y() < 0 || uv.y() >= img.height) continue;
    ASSERT_TRUE(out.point_has_intensity(i));
    EXPECT_NEAR(out.intensity[i], (uv.x() - 0.5) / (img.width - 1), 1.0 / 255);
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(BackProject, SinglePointMarksOnePixel) {
  PointCloud c;
  c.points = {Point3(0, 0, 5)};
  c.labels = {SemanticClass::Window};
  const LabelImage img = back_project_labels(c, kCamera, kLookZ);
  int hits = 0;
  for (auto v : img.pixels) hits += v != LabelImage::kBackground;
  EXPECT_EQ(hits, 1);
  EXPECT_EQ(img.label(160, 128), SemanticClass::Window);
}

TEST(BackProject, NearerPointWins) {
  PointCloud c;
  c.points = {Point3(0, 0, 9), Point3(0, 0, 5), Point3(0, 0, 7)};
  c.labels = {SemanticClass::Wall, SemanticClass::Door, SemanticClass::Roof};
  EXPECT_EQ(back_project_labels(c, kCamera, kLookZ).label(160, 128), SemanticClass::Door);
}

TEST(BackProject, UnlabelledCloudIsAnError) {
  PointCloud c;
  c.points = {Point3(0, 0, 5)};
  EXPECT_THROW(back_project_labels(c, kCamera, kLookZ), Error);
}

TEST(BackProject, AgreesWithRasterization) {
  const std::vector<Rect> rects = {
      {12.0, -12, 12, -8, 8, SemanticClass::Wall},
      {11.0, -3, -1, -2, 1, SemanticClass::Window},
      {11.5, 1, 3, -1, 3, SemanticClass::Door},
      {10.0, -8, 8, 4, 6, SemanticClass::Roof},
  };
  const PointCloud c = sample_rects(rects, 0.015);
  const LabelImage got = back_project_labels(c, kCamera, kLookZ);
  const LabelImage want = rasterize(rects, kCamera);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < want.pixels.size(); ++i) agree += got.pixels[i] == want.pixels[i];
  const double ratio = static_cast<double>(agree) / static_cast<double>(want.pixels.size());
  EXPECT_GE(ratio, 0.99);
}

TEST(BackProject, ColorizingTheLabelImageRecoversLabels) {
  const std::vector<Rect> rects = {
      {12.0, -6, 6, -4, 4, SemanticClass::Wall},
      {10.0, -2, 0, -1, 1, SemanticClass::Window},
      {9.0, 1, 2.5, 0, 2, SemanticClass::Door},
  };
  const PointCloud c = sample_rects(rects, 0.1);
  const LabelImage labels = back_project_labels(c, kCamera, kLookZ);
  Image encoded(labels.width, labels.height);
  for (std::size_t i = 0; i < labels.pixels.size(); ++i) {
    encoded.pixels[i] = labels.pixels[i] == LabelImage::kBackground ? 1.0f : labels.pixels[i] / 10.0f;
  }
  ColorizeParams params;
  params.sampling = IntensitySampling::Nearest;
  params.depth_tolerance = 0.05;
  const std::vector<FramePose> frames = {{kLookZ, encoded}};
  const PointCloud out = colorize_cloud(c, kCamera, frames, params);
  std::size_t visible = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!out.point_has_intensity(i)) continue;
    ++visible;
    EXPECT_EQ(out.intensity[i], static_cast<float>(static_cast<int>(c.labels[i])) / 10.0f) << i;
  }
  EXPECT_GT(visible, c.size() / 2);
}
