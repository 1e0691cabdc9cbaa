#include "ipsr/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "ipsr/error.hpp"

namespace ipsr {

BBox BBox::of(std::span<const Point3> points) {
  BBox b;
  if (points.empty()) return b;
  b.min = b.max = points.front();
  for (const auto& p : points) {
    for (int a = 0; a < 3; ++a) {
      b.min[a] = std::min(b.min[a], p[a]);
      b.max[a] = std::max(b.max[a], p[a]);
    }
  }
  return b;
}

NormalizedCloud normalize_to_domain(std::span<const Point3> points, double padding) {
  if (points.empty()) throw GeometryError("empty point cloud");
  if (!(padding > 0.0 && padding < 0.5)) throw ConfigError("padding must lie in (0, 0.5)");
  for (const auto& p : points)
    if (!is_finite(p)) throw GeometryError("non-finite point coordinate");

  const BBox box = BBox::of(points);
  const Vec3 ext = box.extent();
  const double longest = std::max({ext.x, ext.y, ext.z});
  if (!(longest > 0.0)) throw GeometryError("degenerate extent");

  NormalizedCloud out;
  out.transform.scale = (1.0 - 2.0 * padding) / longest;
  out.transform.offset = Vec3{0.5, 0.5, 0.5} - box.center() * out.transform.scale;
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(out.transform.to_domain(p));
  return out;
}

FaceFrame face_area_normal(const Point3& v0, const Point3& v1, const Point3& v2,
                           int orientation_sign) {
  const Vec3 c = cross(v1 - v0, v2 - v0);
  const double len = norm(c);
  FaceFrame f;
  f.area = 0.5 * len;
  if (len > 0.0 && std::isfinite(len)) {
    f.normal = c * (static_cast<double>(orientation_sign) / len);
  } else {
    f.area = 0.0;
    f.degenerate = true;
  }
  return f;
}

TriangleMesh::TriangleMesh(std::vector<Point3> vertices, std::vector<Triangle> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  frames_.reserve(faces_.size());
  for (const auto& t : faces_) {
    for (auto idx : t)
      if (idx >= vertices_.size()) throw GeometryError("face index out of range");
    frames_.push_back(face_area_normal(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]], 1));
  }
}

Point3 TriangleMesh::centroid(std::size_t face) const {
  const auto& t = faces_[face];
  return (vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]) / 3.0;
}

namespace {

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;  // root is always the smallest member
  }
};

}  // namespace

std::vector<std::vector<std::uint32_t>> connected_components(const TriangleMesh& mesh) {
  const auto& faces = mesh.faces();
  DisjointSets sets(faces.size());
  std::unordered_map<std::uint64_t, std::uint32_t> first_face_of_edge;
  first_face_of_edge.reserve(faces.size() * 2);
  for (std::uint32_t f = 0; f < faces.size(); ++f) {
    for (int e = 0; e < 3; ++e) {
      std::uint64_t a = faces[f][e], b = faces[f][(e + 1) % 3];
      if (a > b) std::swap(a, b);
      const auto [it, inserted] = first_face_of_edge.emplace((a << 32) | b, f);
      if (!inserted) sets.unite(it->second, f);
    }
  }
  std::vector<std::vector<std::uint32_t>> comps;
  std::unordered_map<std::uint32_t, std::size_t> slot;
  for (std::uint32_t f = 0; f < faces.size(); ++f) {
    const auto root = sets.find(f);
    auto [it, inserted] = slot.emplace(root, comps.size());
    if (inserted) comps.emplace_back();
    comps[it->second].push_back(f);
  }
  return comps;
}

}  // namespace ipsr
