#include "ipsr/kdtree.hpp"

#include <algorithm>
#include <cmath>

#include "ipsr/error.hpp"

namespace ipsr {

KdTree::KdTree(std::span<const Point3> points, int leaf_size)
    : points_(points.begin(), points.end()), leaf_size_(leaf_size) {
  if (points_.empty()) throw GeometryError("kd-tree needs at least one point");
  if (leaf_size_ < 1) throw ConfigError("leaf_size must be >= 1");
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * points_.size() / static_cast<std::size_t>(leaf_size_) + 1);
  build(0, static_cast<std::uint32_t>(order_.size()), 1);
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end, int level) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  depth_ = std::max(depth_, level);
  if (end - begin <= static_cast<std::uint32_t>(leaf_size_)) return id;

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (auto i = begin; i < end; ++i) {
    const auto& p = points_[order_[i]];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  const Vec3 ext = hi - lo;
  const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  const std::uint32_t mid = begin + (end - begin) / 2;
  const auto less = [&](std::uint32_t a, std::uint32_t b) {
    const double pa = points_[a][axis], pb = points_[b][axis];
    return pa != pb ? pa < pb : a < b;
  };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, less);

  nodes_[id].axis = axis;
  nodes_[id].split = points_[order_[mid]][axis];
  const auto left = build(begin, mid, level + 1);
  const auto right = build(mid, end, level + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

// Bounded max-heap ordered by (squared distance, index).
struct KdTree::Heap {
  std::vector<std::pair<double, std::uint32_t>> items;
  std::size_t capacity;

  bool full() const { return items.size() == capacity; }
  double worst() const { return items.front().first; }

  void offer(double d2, std::uint32_t idx) {
    const std::pair<double, std::uint32_t> cand{d2, idx};
    if (!full()) {
      items.push_back(cand);
      std::push_heap(items.begin(), items.end());
    } else if (cand < items.front()) {
      std::pop_heap(items.begin(), items.end());
      items.back() = cand;
      std::push_heap(items.begin(), items.end());
    }
  }
};

void KdTree::search(std::int32_t id, const Point3& q, Heap& heap) const {
  const Node& node = nodes_[id];
  if (node.left < 0) {
    for (auto i = node.begin; i < node.end; ++i) {
      const auto idx = order_[i];
      heap.offer(squared_distance(points_[idx], q), idx);
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const auto near = diff < 0.0 ? node.left : node.right;
  const auto far = diff < 0.0 ? node.right : node.left;
  search(near, q, heap);
  // Equal plane distance may still hide an equal-distance point with a smaller index.
  if (!heap.full() || diff * diff <= heap.worst()) search(far, q, heap);
}

std::vector<Neighbor> KdTree::knn(const Point3& query, int k) const {
  if (k < 1) throw ConfigError("k must be >= 1");
  Heap heap{{}, std::min<std::size_t>(static_cast<std::size_t>(k), points_.size())};
  heap.items.reserve(heap.capacity);
  search(0, query, heap);
  std::sort_heap(heap.items.begin(), heap.items.end());
  std::vector<Neighbor> out;
  out.reserve(heap.items.size());
  for (const auto& [d2, idx] : heap.items) out.push_back({idx, std::sqrt(d2)});
  return out;
}

void KdTree::knn_indices(const Point3& query, int k, std::vector<std::uint32_t>& out) const {
  if (k < 1) throw ConfigError("k must be >= 1");
  Heap heap{{}, std::min<std::size_t>(static_cast<std::size_t>(k), points_.size())};
  heap.items.reserve(heap.capacity);
  search(0, query, heap);
  std::sort_heap(heap.items.begin(), heap.items.end());
  out.clear();
  for (const auto& item : heap.items) out.push_back(item.second);
}

}  // namespace ipsr
