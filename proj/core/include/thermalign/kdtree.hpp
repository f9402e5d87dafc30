#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "thermalign/error.hpp"
#include "thermalign/geometry.hpp"

namespace thermalign {

/// Static k-d tree over Dim-dimensional points for exact nearest-neighbour
/// and fixed-radius queries. Ties on distance resolve to the lowest index.
template <int Dim>
class KdTree {
 public:
  using Vector = Eigen::Matrix<double, Dim, 1>;

  struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;
  };

  KdTree() = default;

  explicit KdTree(std::span<const Vector> points, std::size_t leaf_size = 10)
      : leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    data_.resize(points.size() * Dim);
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (int d = 0; d < Dim; ++d) data_[i * Dim + d] = points[i][d];
    }
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    if (!order_.empty()) {
      nodes_.reserve(2 * points.size() / leaf_size_ + 1);
      build(0, static_cast<std::uint32_t>(order_.size()));
    }
  }

  std::size_t size() const noexcept { return order_.size(); }
  bool empty() const noexcept { return order_.empty(); }

  Vector point(std::size_t i) const {
    return Eigen::Map<const Vector>(data_.data() + i * Dim);
  }

  Neighbor nearest(const Vector& query) const {
    if (empty()) throw Error(ErrorCode::EmptyInput, "nearest-neighbour query on an empty index");
    Best best;
    search_nearest(0, query.data(), best);
    return {best.index, std::sqrt(best.dist2)};
  }

  /// All points with distance <= radius, ordered by index.
  void radius_search(const Vector& query, double radius, std::vector<Neighbor>& out) const {
    out.clear();
    if (empty() || radius < 0.0) return;
    search_radius(0, query.data(), radius * radius, out);
    std::sort(out.begin(), out.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
    for (auto& n : out) n.distance = std::sqrt(n.distance);
  }

  std::vector<Neighbor> radius_search(const Vector& query, double radius) const {
    std::vector<Neighbor> out;
    radius_search(query, radius, out);
    return out;
  }

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t split_dim = -1;  // -1 marks a leaf
    double split = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  struct Best {
    std::size_t index = std::numeric_limits<std::size_t>::max();
    double dist2 = std::numeric_limits<double>::infinity();
  };

  const double* at(std::uint32_t i) const { return data_.data() + std::size_t{i} * Dim; }

  static double dist2(const double* a, const double* b) {
    double s = 0.0;
    for (int d = 0; d < Dim; ++d) {
      const double diff = a[d] - b[d];
      s += diff * diff;
    }
    return s;
  }

  std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size_) return id;

    int best_dim = 0;
    double best_spread = -1.0;
    for (int d = 0; d < Dim; ++d) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::uint32_t i = begin; i < end; ++i) {
        const double v = at(order_[i])[d];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = d;
      }
    }
    if (best_spread <= 0.0) return id;  // all points identical

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return at(a)[best_dim] < at(b)[best_dim];
                     });
    const double split = at(order_[mid])[best_dim];
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    Node& node = nodes_[id];
    node.split_dim = best_dim;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

  // Left subtree holds values <= split, right subtree values >= split.
  void search_nearest(std::uint32_t id, const double* q, Best& best) const {
    const Node& node = nodes_[id];
    if (node.split_dim < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t idx = order_[i];
        const double d2 = dist2(at(idx), q);
        if (d2 < best.dist2 || (d2 == best.dist2 && idx < best.index)) {
          best.dist2 = d2;
          best.index = idx;
        }
      }
      return;
    }
    const double diff = q[node.split_dim] - node.split;
    const std::uint32_t near = diff <= 0.0 ? node.left : node.right;
    const std::uint32_t far = diff <= 0.0 ? node.right : node.left;
    search_nearest(near, q, best);
    if (diff * diff <= best.dist2) search_nearest(far, q, best);
  }

  void search_radius(std::uint32_t id, const double* q, double r2, std::vector<Neighbor>& out) const {
    const Node& node = nodes_[id];
    if (node.split_dim < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t idx = order_[i];
        const double d2 = dist2(at(idx), q);
        if (d2 <= r2) out.push_back({idx, d2});
      }
      return;
    }
    const double diff = q[node.split_dim] - node.split;
    if (diff <= 0.0 || diff * diff <= r2) search_radius(node.left, q, r2, out);
    if (diff >= 0.0 || diff * diff <= r2) search_radius(node.right, q, r2, out);
  }

  std::size_t leaf_size_ = 10;
  std::vector<double> data_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Nearest-neighbour index over a cloud's positions.
using SpatialIndex = KdTree<3>;

inline SpatialIndex build_index(const PointCloud& cloud) {
  return SpatialIndex(std::span<const Point3>(cloud.points));
}

}  // namespace thermalign
