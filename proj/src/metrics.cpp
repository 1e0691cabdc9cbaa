#include "ipsr/metrics.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

#include "ipsr/error.hpp"

namespace ipsr {

// Ericson, Real-Time Collision Detection, 5.1.5.
Point3 closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b,
                                 const Point3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = va + vb + vc;
  if (!(denom > 0.0)) {
    // Degenerate triangle: nearest of its three edges.
    Point3 best = a;
    double best_d = squared_distance(p, a);
    const std::array<std::pair<Point3, Point3>, 3> edges{{{a, b}, {b, c}, {c, a}}};
    for (const auto& [s, e] : edges) {
      const Vec3 d = e - s;
      const double len2 = squared_norm(d);
      const double t = len2 > 0.0 ? std::clamp(dot(p - s, d) / len2, 0.0, 1.0) : 0.0;
      const Point3 q = s + d * t;
      if (const double dq = squared_distance(p, q); dq < best_d) best_d = dq, best = q;
    }
    return best;
  }
  const double v = vb / denom, w = vc / denom;
  return a + ab * v + ac * w;
}

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) : mesh_(mesh) {
  if (mesh.empty()) throw GeometryError("distance query on an empty mesh");
  tris_.resize(mesh.face_count());
  centroids_.resize(mesh.face_count());
  for (std::uint32_t f = 0; f < tris_.size(); ++f) {
    tris_[f] = f;
    centroids_[f] = mesh.centroid(f);
  }
  nodes_.reserve(2 * tris_.size());
  build(0, static_cast<std::uint32_t>(tris_.size()));
}

std::int32_t TriangleBvh::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Point3 lo = mesh_.vertices()[mesh_.faces()[tris_[begin]][0]], hi = lo;
  for (auto i = begin; i < end; ++i)
    for (auto v : mesh_.faces()[tris_[i]]) {
      const auto& p = mesh_.vertices()[v];
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    }
  nodes_[id].lo = lo;
  nodes_[id].hi = hi;
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= 4) return id;

  const Vec3 ext = hi - lo;
  const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  const auto mid = begin + (end - begin) / 2;
  std::nth_element(tris_.begin() + begin, tris_.begin() + mid, tris_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return centroids_[a][axis] < centroids_[b][axis];
                   });
  const auto l = build(begin, mid);
  const auto r = build(mid, end);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

namespace {

double box_distance2(const Point3& p, const Point3& lo, const Point3& hi) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = p[a] < lo[a] ? lo[a] - p[a] : (p[a] > hi[a] ? p[a] - hi[a] : 0.0);
    d2 += d * d;
  }
  return d2;
}

}  // namespace

void TriangleBvh::query(std::int32_t id, const Point3& p, double& best2) const {
  const Node& node = nodes_[id];
  if (node.left < 0) {
    for (auto i = node.begin; i < node.end; ++i) {
      const auto& t = mesh_.faces()[tris_[i]];
      const auto& v = mesh_.vertices();
      const Point3 q = closest_point_on_triangle(p, v[t[0]], v[t[1]], v[t[2]]);
      best2 = std::min(best2, squared_distance(p, q));
    }
    return;
  }
  const double dl = box_distance2(p, nodes_[node.left].lo, nodes_[node.left].hi);
  const double dr = box_distance2(p, nodes_[node.right].lo, nodes_[node.right].hi);
  const auto first = dl <= dr ? node.left : node.right;
  const auto second = dl <= dr ? node.right : node.left;
  if (std::min(dl, dr) < best2) query(first, p, best2);
  if (std::max(dl, dr) < best2) query(second, p, best2);
}

double TriangleBvh::distance(const Point3& p) const {
  double best2 = std::numeric_limits<double>::infinity();
  query(0, p, best2);
  return std::sqrt(best2);
}

std::vector<Point3> sample_surface(const TriangleMesh& mesh, std::size_t count,
                                   std::uint64_t seed) {
  if (mesh.empty()) throw GeometryError("cannot sample an empty mesh");
  std::vector<double> cdf(mesh.face_count());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    total += mesh.frames()[f].area;
    cdf[f] = total;
  }
  if (!(total > 0.0)) throw GeometryError("mesh has zero surface area");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Point3> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double pick = u01(rng) * total;
    const auto f = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin()),
        cdf.size() - 1);
    double r1 = u01(rng), r2 = u01(rng);
    if (r1 + r2 > 1.0) r1 = 1.0 - r1, r2 = 1.0 - r2;
    const auto& t = mesh.faces()[f];
    const auto& v = mesh.vertices();
    out.push_back(v[t[0]] + (v[t[1]] - v[t[0]]) * r1 + (v[t[2]] - v[t[0]]) * r2);
  }
  return out;
}

SurfaceDistance symmetric_distance(const TriangleMesh& recon, const TriangleMesh& reference,
                                   std::size_t samples_per_direction, std::uint64_t seed,
                                   double scale) {
  if (recon.empty() || reference.empty()) throw GeometryError("symmetric distance needs non-empty meshes");
  if (samples_per_direction < 1) throw ConfigError("samples_per_direction must be >= 1");
  if (!(scale > 0.0)) scale = BBox::of(reference.vertices()).diagonal();
  if (!(scale > 0.0)) throw GeometryError("reference mesh has zero extent");

  const TriangleBvh recon_bvh(recon), ref_bvh(reference);
  const auto from_recon = sample_surface(recon, samples_per_direction, seed);
  const auto from_ref = sample_surface(reference, samples_per_direction, seed + 1);

  const auto total = static_cast<std::ptrdiff_t>(2 * samples_per_direction);
  std::vector<double> dist(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    const auto s = static_cast<std::size_t>(i);
    dist[s] = s < samples_per_direction ? ref_bvh.distance(from_recon[s])
                                        : recon_bvh.distance(from_ref[s - samples_per_direction]);
  }
  SurfaceDistance out;
  double sum = 0.0;
  for (double d : dist) {
    sum += d;
    out.max = std::max(out.max, d);
  }
  out.mean = sum / static_cast<double>(dist.size()) / scale;
  out.max /= scale;
  return out;
}

double inward_fraction(const SampleSet& samples, const NormalField& truth) {
  if (samples.size() == 0) return 0.0;
  std::size_t good = 0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (dot(samples.normals[i], truth(samples.positions[i])) > 0.0) ++good;
  return static_cast<double>(good) / static_cast<double>(samples.size());
}

Topology topology_check(const TriangleMesh& mesh) {
  std::unordered_map<std::uint64_t, int> edge_use;
  std::vector<bool> referenced(mesh.vertex_count(), false);
  for (const auto& t : mesh.faces())
    for (int e = 0; e < 3; ++e) {
      referenced[t[e]] = true;
      std::uint64_t a = t[e], b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_use[(a << 32) | b];
    }
  Topology topo;
  topo.closed = !mesh.empty();
  for (const auto& [key, uses] : edge_use)
    if (uses != 2) topo.closed = false;
  const auto v = std::count(referenced.begin(), referenced.end(), true);
  topo.euler = static_cast<long long>(v) - static_cast<long long>(edge_use.size()) +
               static_cast<long long>(mesh.face_count());
  topo.components = connected_components(mesh).size();
  return topo;
}

}  // namespace ipsr
