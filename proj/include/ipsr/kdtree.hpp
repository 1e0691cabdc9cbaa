#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ipsr/geometry.hpp"

namespace ipsr {

struct Neighbor {
  std::uint32_t index;
  double distance;
};

/// Static balanced kd-tree with exact k-nearest-neighbor queries.
///
/// Splits at the median of the widest axis; ties in coordinate are ordered by
/// point index, so construction is deterministic. Queries are const and safe to
/// run concurrently.
class KdTree {
 public:
  static constexpr int kDefaultLeafSize = 16;

  explicit KdTree(std::span<const Point3> points, int leaf_size = kDefaultLeafSize);

  /// The min(k, n) nearest points ascending by distance; equal distances are
  /// ordered by smaller index.
  std::vector<Neighbor> knn(const Point3& query, int k) const;

  /// Same as knn() but reuses `out` and returns only indices.
  void knn_indices(const Point3& query, int k, std::vector<std::uint32_t>& out) const;

  std::size_t size() const { return points_.size(); }
  int depth() const { return depth_; }
  int leaf_size() const { return leaf_size_; }

  /// Point indices in leaf order (each index exactly once).
  const std::vector<std::uint32_t>& leaf_order() const { return order_; }

 private:
  struct Node {
    // Leaves: [begin, end) into order_; inner nodes: children and split plane.
    std::uint32_t begin = 0, end = 0;
    std::int32_t left = -1, right = -1;
    int axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, int level);

  struct Heap;
  void search(std::int32_t node, const Point3& q, Heap& heap) const;

  std::vector<Point3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  int leaf_size_;
  int depth_ = 0;
};

}  // namespace ipsr
