#include "ipsr/hull.hpp"

#include <algorithm>
#include <unordered_map>

#include "ipsr/error.hpp"

namespace ipsr {

namespace {

struct Facet {
  std::array<std::uint32_t, 3> v;
  std::array<std::int32_t, 3> adj;  // facet across edge v[i] -> v[i+1]
  Vec3 normal;
  double offset = 0.0;
  std::vector<std::uint32_t> outside;
  std::uint32_t farthest = 0;
  double farthest_dist = 0.0;
  bool alive = true;
  std::uint32_t visit = 0;
};

class QuickHull {
 public:
  QuickHull(std::span<const Point3> pts, double eps) : pts_(pts), eps_(eps) {}

  std::vector<std::uint32_t> run() {
    make_simplex();
    std::vector<std::int32_t> pending;
    for (std::int32_t f = 0; f < static_cast<std::int32_t>(facets_.size()); ++f)
      if (!facets_[f].outside.empty()) pending.push_back(f);

    while (!pending.empty()) {
      const auto f = pending.back();
      pending.pop_back();
      if (!facets_[f].alive || facets_[f].outside.empty()) continue;
      add_point(f, pending);
    }

    std::vector<std::uint32_t> verts;
    for (const auto& f : facets_)
      if (f.alive) verts.insert(verts.end(), f.v.begin(), f.v.end());
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    return verts;
  }

 private:
  double dist(const Facet& f, std::uint32_t p) const { return dot(f.normal, pts_[p]) - f.offset; }

  std::int32_t new_facet(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    Facet f;
    f.v = {a, b, c};
    f.adj = {-1, -1, -1};
    const Vec3 n = cross(pts_[b] - pts_[a], pts_[c] - pts_[a]);
    f.normal = normalized_or_zero(n);
    f.offset = dot(f.normal, pts_[a]);
    facets_.push_back(std::move(f));
    return static_cast<std::int32_t>(facets_.size() - 1);
  }

  void assign(std::span<const std::uint32_t> candidates, std::span<const std::int32_t> targets) {
    for (auto p : candidates) {
      for (auto t : targets) {
        auto& f = facets_[t];
        const double d = dist(f, p);
        if (d > eps_) {
          if (f.outside.empty() || d > f.farthest_dist) {
            f.farthest = p;
            f.farthest_dist = d;
          }
          f.outside.push_back(p);
          break;
        }
      }
    }
  }

  void make_simplex() {
    const auto n = static_cast<std::uint32_t>(pts_.size());
    // Extreme points along the axes; pick the most distant pair.
    std::array<std::uint32_t, 6> ext{};
    for (std::uint32_t i = 0; i < n; ++i)
      for (int a = 0; a < 3; ++a) {
        if (pts_[i][a] < pts_[ext[2 * a]][a]) ext[2 * a] = i;
        if (pts_[i][a] > pts_[ext[2 * a + 1]][a]) ext[2 * a + 1] = i;
      }
    std::uint32_t i0 = 0, i1 = 0;
    double best = -1.0;
    for (auto a : ext)
      for (auto b : ext)
        if (const double d = squared_distance(pts_[a], pts_[b]); d > best) best = d, i0 = a, i1 = b;
    if (best <= eps_ * eps_) throw GeometryError("convex hull input is degenerate");

    const Vec3 dir = pts_[i1] - pts_[i0];
    std::uint32_t i2 = i0;
    best = 0.0;
    for (std::uint32_t i = 0; i < n; ++i)
      if (const double d = squared_norm(cross(pts_[i] - pts_[i0], dir)); d > best) best = d, i2 = i;
    if (std::sqrt(best) / norm(dir) <= eps_) throw GeometryError("convex hull input is collinear");

    const Vec3 pn = normalized_or_zero(cross(pts_[i1] - pts_[i0], pts_[i2] - pts_[i0]));
    std::uint32_t i3 = i0;
    best = 0.0;
    for (std::uint32_t i = 0; i < n; ++i)
      if (const double d = std::abs(dot(pts_[i] - pts_[i0], pn)); d > best) best = d, i3 = i;
    if (best <= eps_) throw GeometryError("convex hull input is coplanar");

    // Orient the base so the apex is behind it.
    if (dot(pts_[i3] - pts_[i0], pn) > 0.0) std::swap(i1, i2);
    const auto f0 = new_facet(i0, i1, i2);
    const auto f1 = new_facet(i0, i3, i1);
    const auto f2 = new_facet(i1, i3, i2);
    const auto f3 = new_facet(i2, i3, i0);
    link_all({f0, f1, f2, f3});

    std::vector<std::uint32_t> rest;
    rest.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i)
      if (i != i0 && i != i1 && i != i2 && i != i3) rest.push_back(i);
    const std::array<std::int32_t, 4> all{f0, f1, f2, f3};
    assign(rest, all);
  }

  // Connects facets that share directed edges in opposite directions.
  void link_all(std::initializer_list<std::int32_t> ids) {
    std::unordered_map<std::uint64_t, std::pair<std::int32_t, int>> half;
    for (auto f : ids)
      for (int e = 0; e < 3; ++e)
        half[(std::uint64_t{facets_[f].v[e]} << 32) | facets_[f].v[(e + 1) % 3]] = {f, e};
    for (auto f : ids)
      for (int e = 0; e < 3; ++e) {
        const auto key = (std::uint64_t{facets_[f].v[(e + 1) % 3]} << 32) | facets_[f].v[e];
        facets_[f].adj[e] = half.at(key).first;
      }
  }

  void add_point(std::int32_t start, std::vector<std::int32_t>& pending) {
    const std::uint32_t eye = facets_[start].farthest;
    const Point3& ep = pts_[eye];
    ++stamp_;

    // Visible region by flood fill; horizon edges are recorded as
    // (facet, edge) pairs on the invisible side.
    std::vector<std::int32_t> visible{start};
    facets_[start].visit = stamp_;
    struct HorizonEdge {
      std::uint32_t a, b;      // directed as in the visible facet
      std::int32_t other;      // invisible neighbour
    };
    std::vector<HorizonEdge> horizon;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const auto f = visible[q];
      for (int e = 0; e < 3; ++e) {
        const auto g = facets_[f].adj[e];
        if (facets_[g].visit == stamp_) continue;
        if (dot(facets_[g].normal, ep) - facets_[g].offset > eps_) {
          facets_[g].visit = stamp_;
          visible.push_back(g);
        } else {
          horizon.push_back({facets_[f].v[e], facets_[f].v[(e + 1) % 3], g});
        }
      }
    }
    std::vector<std::uint32_t> orphans;
    for (auto f : visible) {
      auto& fv = facets_[f];
      fv.alive = false;
      for (auto p : fv.outside)
        if (p != eye) orphans.push_back(p);
      fv.outside.clear();
      fv.outside.shrink_to_fit();
    }

    std::unordered_map<std::uint32_t, std::int32_t> starting_at;
    std::vector<std::int32_t> created;
    created.reserve(horizon.size());
    for (const auto& he : horizon) {
      const auto nf = new_facet(he.a, he.b, eye);
      created.push_back(nf);
      starting_at[he.a] = nf;
      facets_[nf].adj[0] = he.other;
      auto& other = facets_[he.other];
      for (int e = 0; e < 3; ++e)
        if (other.v[e] == he.b && other.v[(e + 1) % 3] == he.a) other.adj[e] = nf;
    }
    for (auto nf : created) {
      auto& f = facets_[nf];
      // Edge 1 is b -> eye, shared with the facet starting at b.
      f.adj[1] = starting_at.at(f.v[1]);
    }
    for (auto nf : created) {
      // Edge 2 (eye -> a) of the facet starting at b pairs with edge 1 of nf.
      const auto next = facets_[nf].adj[1];
      facets_[next].adj[2] = nf;
    }

    assign(orphans, created);
    for (auto nf : created)
      if (!facets_[nf].outside.empty()) pending.push_back(nf);
  }

  std::span<const Point3> pts_;
  double eps_;
  std::vector<Facet> facets_;
  std::uint32_t stamp_ = 0;
};

}  // namespace

std::vector<std::uint32_t> quickhull3(std::span<const Point3> points) {
  if (points.size() < 4) throw GeometryError("convex hull needs at least 4 points");
  const double diag = BBox::of(points).diagonal();
  if (!(diag > 0.0)) throw GeometryError("convex hull input is degenerate");
  return QuickHull(points, 1e-10 * diag).run();
}

}  // namespace ipsr
