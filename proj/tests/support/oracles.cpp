#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace oracle {

Nearest brute_nearest(const std::vector<Point3>& points, const Point3& q) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d2 = (points[i] - q).squaredNorm();
    if (d2 < best_d2) {
      best = i;
      best_d2 = d2;
    }
  }
  return {best, std::sqrt(best_d2)};
}

Metrics brute_metrics(const std::vector<Point3>& source, const std::vector<Point3>& target,
                      const thermalign::RigidTransform& t, double threshold) {
  Metrics m;
  double sum = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Point3 p = t.rotation * source[i] + t.translation;
    const Nearest nn = brute_nearest(target, p);
    if (nn.distance <= threshold) {
      m.inliers.push_back(i);
      sum += nn.distance * nn.distance;
    }
  }
  m.fitness = std::min(1.0, static_cast<double>(m.inliers.size()) / static_cast<double>(target.size()));
  if (!m.inliers.empty()) m.rmse = std::sqrt(sum / static_cast<double>(m.inliers.size()));
  return m;
}

int winding_number(const Eigen::Vector2d& q, const thermalign::Ring2& ring) {
  int wn = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = ring[i];
    const Eigen::Vector2d& b = ring[(i + 1) % n];
    const double cross = (b.x() - a.x()) * (q.y() - a.y()) - (q.x() - a.x()) * (b.y() - a.y());
    if (a.y() <= q.y()) {
      if (b.y() > q.y() && cross > 0) ++wn;
    } else {
      if (b.y() <= q.y() && cross < 0) --wn;
    }
  }
  return wn;
}

PlaneFit svd_plane(const std::vector<Point3>& points) {
  Eigen::MatrixXd m(points.size(), 3);
  Point3 c = Point3::Zero();
  for (const auto& p : points) c += p;
  c /= static_cast<double>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = (points[i] - c).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
  Vector3 n = svd.matrixV().col(2).normalized();
  Eigen::Index k;
  n.cwiseAbs().maxCoeff(&k);
  if (n[k] < 0) n = -n;
  return {n, n.dot(c)};
}

Eigen::Vector2d projection_matrix_product(const thermalign::CameraModel& cam, const thermalign::RigidTransform& pose,
                                          const Point3& x) {
  Eigen::Matrix3d k;
  k << cam.aspect * cam.focal, 0, cam.cx, 0, cam.focal, cam.cy, 0, 0, 1;
  Eigen::Matrix<double, 3, 4> rt;
  rt.leftCols<3>() = pose.rotation;
  rt.col(3) = pose.translation;
  const Eigen::Matrix<double, 3, 4> p = k * rt;
  const Eigen::Vector3d h = p * x.homogeneous();
  return h.hnormalized();
}

std::optional<PairAngles> darboux_angles(const Point3& ps, const Vector3& ns, const Point3& pt, const Vector3& nt) {
  const Vector3 d = pt - ps;
  const double len = d.norm();
  if (len == 0.0) return std::nullopt;
  const Vector3 dir = d / len;
  // Angle between each normal and the line, folded to [0, pi/2].
  const double a_s = std::acos(std::min(1.0, std::abs(ns.dot(dir))));
  const double a_t = std::acos(std::min(1.0, std::abs(nt.dot(dir))));
  Vector3 u, n2, line;
  if (a_s <= a_t) {
    u = ns;
    n2 = nt;
    line = dir;
  } else {
    u = nt;
    n2 = ns;
    line = -dir;
  }
  Vector3 v = line.cross(u);
  if (v.norm() == 0.0) return std::nullopt;
  v.normalize();
  const Vector3 w = u.cross(v);
  return PairAngles{std::atan2(w.dot(n2), u.dot(n2)), v.dot(n2), u.dot(line)};
}

namespace {
int bin(double value, double lo, double hi) {
  int b = static_cast<int>(std::floor(11.0 * (value - lo) / (hi - lo)));
  if (b < 0) b = 0;
  if (b > 10) b = 10;
  return b;
}
}  // namespace

std::vector<std::vector<double>> brute_fpfh(const std::vector<Point3>& points, const std::vector<Vector3>& normals,
                                            double radius) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> spfh(n, std::vector<double>(33, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    int used = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || (points[j] - points[i]).norm() > radius) continue;
      const auto f = darboux_angles(points[i], normals[i], points[j], normals[j]);
      if (!f) continue;
      spfh[i][bin(f->theta, -std::numbers::pi, std::numbers::pi)] += 1;
      spfh[i][11 + bin(f->alpha, -1, 1)] += 1;
      spfh[i][22 + bin(f->phi, -1, 1)] += 1;
      ++used;
    }
    if (used) {
      for (auto& v : spfh[i]) v *= 100.0 / used;
    }
  }
  std::vector<std::vector<double>> out(n, std::vector<double>(33, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = (points[j] - points[i]).norm();
      if (j == i || d > radius || d == 0.0) continue;
      for (int b = 0; b < 33; ++b) out[i][b] += spfh[j][b] / (d * d);
    }
    for (int block = 0; block < 3; ++block) {
      double s = 0;
      for (int b = 0; b < 11; ++b) s += out[i][block * 11 + b];
      if (s > 0) {
        for (int b = 0; b < 11; ++b) out[i][block * 11 + b] *= 100.0 / s;
      }
    }
  }
  return out;
}

std::pair<double, double> two_pass_mean_std(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Matrix3d a;
  for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = g(rng);
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
  Eigen::Matrix3d q = qr.householderQ();
  const Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 3; ++i) {
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  }
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

thermalign::RigidTransform random_transform(std::mt19937_64& rng, double max_translation) {
  std::uniform_real_distribution<double> u(-max_translation, max_translation);
  thermalign::RigidTransform t;
  t.rotation = random_rotation(rng);
  t.translation = Vector3(u(rng), u(rng), u(rng));
  return t;
}

}  // namespace oracle
