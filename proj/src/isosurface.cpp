#include "ipsr/isosurface.hpp"

#include <algorithm>
#include <stdexcept>
#include <cmath>

#include "ipsr/error.hpp"

namespace ipsr {

namespace {

using kernels::Exec;
using kernels::Grid3;

// Edge e: axis e / 4; the remaining two coordinates come from bits of e % 4.
constexpr std::array<std::array<int, 2>, 12> kEdges = {{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // x
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // y
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // z
}};

int edge_between(int a, int b) {
  for (int e = 0; e < 12; ++e)
    if ((kEdges[e][0] == a && kEdges[e][1] == b) || (kEdges[e][0] == b && kEdges[e][1] == a))
      return e;
  return -1;
}

Vec3 corner_pos(int c) { return {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; }

Vec3 edge_mid(int e) { return (corner_pos(kEdges[e][0]) + corner_pos(kEdges[e][1])) * 0.5; }

// Cube faces as corner cycles, with outward normals.
struct CubeFace {
  std::array<int, 4> cycle;
  Vec3 outward;
};
const std::array<CubeFace, 6> kFaces = {{
    {{0, 2, 6, 4}, {-1, 0, 0}},
    {{1, 3, 7, 5}, {1, 0, 0}},
    {{0, 1, 5, 4}, {0, -1, 0}},
    {{2, 3, 7, 6}, {0, 1, 0}},
    {{0, 1, 3, 2}, {0, 0, -1}},
    {{4, 5, 7, 6}, {0, 0, 1}},
}};

bool on_face(const CubeFace& f, int e) {
  const auto has = [&f](int c) { return std::find(f.cycle.begin(), f.cycle.end(), c) != f.cycle.end(); };
  return has(kEdges[e][0]) && has(kEdges[e][1]);
}

// A chord between two vertices on one cube face would also be a chord of the
// neighbouring cell, which can pick the same one and make the edge
// non-manifold.
bool shared_face(int a, int b) {
  for (const auto& f : kFaces)
    if (on_face(f, a) && on_face(f, b)) return true;
  return false;
}

// Triangulates an oriented loop with the fewest chords lying in a cube face
// (none occur in practice); ties keep the lowest split vertex.
void triangulate_loop(const std::vector<int>& loop, std::vector<std::array<std::uint8_t, 3>>& out) {
  const int n = static_cast<int>(loop.size());
  const auto chord_cost = [&](int i, int j) {
    return (j - i == 1 || (i == 0 && j == n - 1)) ? 0 : int(shared_face(loop[i], loop[j]));
  };
  std::vector<std::vector<int>> cost(n, std::vector<int>(n, 0)), split(n, std::vector<int>(n, -1));
  for (int len = 2; len < n; ++len)
    for (int i = 0; i + len < n; ++i) {
      const int j = i + len;
      cost[i][j] = 1 << 20;
      for (int m = i + 1; m < j; ++m) {
        const int c = cost[i][m] + cost[m][j] + chord_cost(i, m) + chord_cost(m, j);
        if (c < cost[i][j]) cost[i][j] = c, split[i][j] = m;
      }
    }
  const auto emit = [&](auto&& self, int i, int j) -> void {
    if (j - i < 2) return;
    const int m = split[i][j];
    out.push_back({static_cast<std::uint8_t>(loop[i]), static_cast<std::uint8_t>(loop[m]),
                   static_cast<std::uint8_t>(loop[j])});
    self(self, i, m);
    self(self, m, j);
  };
  emit(emit, 0, n - 1);
}

// Every cube face is cut independently: each inside corner region is bounded
// by a segment between two cut edges, and on a saddle face (inside corners
// diagonal) the two inside corners are kept apart. The choice depends only on
// the face's corner signs, so two cells sharing a face cut it identically and
// the extracted surface is closed. Segments are oriented with the inside on the
// left when seen from outside the cube; chaining them gives oriented loops,
// each fanned into triangles.
CubeCase build_case(int config) {
  const auto inside = [config](int c) { return (config >> c) & 1; };
  std::array<int, 12> next;
  next.fill(-1);

  for (const auto& face : kFaces) {
    const auto& cyc = face.cycle;
    std::vector<std::array<int, 3>> segs;  // {edge a, edge b, reference inside corner}
    int cuts = 0;
    for (int i = 0; i < 4; ++i) cuts += inside(cyc[i]) != inside(cyc[(i + 1) % 4]);
    if (cuts == 2) {
      int e_in = -1, e_out = -1, ref = -1;
      for (int i = 0; i < 4; ++i) {
        const int a = cyc[i], b = cyc[(i + 1) % 4];
        if (inside(a) && !inside(b)) e_out = edge_between(a, b), ref = a;
        if (!inside(a) && inside(b)) e_in = edge_between(a, b);
      }
      segs.push_back({e_in, e_out, ref});
    } else if (cuts == 4) {
      for (int i = 0; i < 4; ++i) {
        if (!inside(cyc[i])) continue;
        const int prev = cyc[(i + 3) % 4], next_c = cyc[(i + 1) % 4];
        segs.push_back({edge_between(prev, cyc[i]), edge_between(cyc[i], next_c), cyc[i]});
      }
    }
    for (auto [a, b, ref] : segs) {
      const Vec3 pa = edge_mid(a), pb = edge_mid(b);
      // Inside corner must be on the left of a->b viewed along -outward.
      if (dot(cross(pb - pa, corner_pos(ref) - pa), face.outward) < 0.0) std::swap(a, b);
      if (next[a] != -1) throw std::logic_error("inconsistent cube face segments");
      next[a] = b;
    }
  }

  CubeCase out;
  std::array<bool, 12> used{};
  for (int start = 0; start < 12; ++start) {
    if (next[start] < 0 || used[start]) continue;
    std::vector<int> loop;
    for (int e = start; !used[e]; e = next[e]) {
      used[e] = true;
      loop.push_back(e);
    }
    triangulate_loop(loop, out.triangles);
  }
  return out;
}

std::array<CubeCase, 256> build_table() {
  std::array<CubeCase, 256> table;
  for (int c = 0; c < 256; ++c) table[c] = build_case(c);
  // Loop orientation yields normals pointing away from the inside corners;
  // flip every triangle so normals face the inside (increasing value).
  const auto& probe = table[1].triangles.front();
  const Vec3 n = cross(edge_mid(probe[1]) - edge_mid(probe[0]), edge_mid(probe[2]) - edge_mid(probe[0]));
  if (dot(n, corner_pos(0) - edge_mid(probe[0])) < 0.0)
    for (auto& cc : table)
      for (auto& t : cc.triangles) std::swap(t[1], t[2]);
  return table;
}

// Global id of a grid edge: start node * 3 + axis.
std::uint64_t grid_edge_id(const Grid3& g, int i, int j, int k, int e) {
  const int a = kEdges[e][0];
  const int axis = e / 4;
  return static_cast<std::uint64_t>(g.index(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1))) *
             3 +
         static_cast<std::uint64_t>(axis);
}

using EdgeTri = std::array<std::uint64_t, 3>;

void extract_slab(const GridField& field, double iso, int k, std::vector<EdgeTri>& out) {
  const auto& table = cube_case_table();
  const Grid3 g = field.grid();
  const int r = field.resolution;
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < r; ++i) {
      int config = 0;
      for (int c = 0; c < 8; ++c)
        if (field.values[g.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))] > iso)
          config |= 1 << c;
      for (const auto& t : table[config].triangles)
        out.push_back({grid_edge_id(g, i, j, k, t[0]), grid_edge_id(g, i, j, k, t[1]),
                       grid_edge_id(g, i, j, k, t[2])});
    }
}

}  // namespace

std::array<int, 2> cube_edge_corners(int e) { return kEdges.at(static_cast<std::size_t>(e)); }

const std::array<CubeCase, 256>& cube_case_table() {
  static const std::array<CubeCase, 256> table = build_table();
  return table;
}

TriangleMesh marching_cubes(const GridField& field, double iso, Exec exec) {
  if (!std::isfinite(iso)) throw ConfigError("iso-value must be finite");
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  if (field.values.empty() || !(iso >= *lo && iso < *hi)) return {};

  const int r = field.resolution;
  std::vector<std::vector<EdgeTri>> slabs(static_cast<std::size_t>(r));
  cube_case_table();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < r; ++k) extract_slab(field, iso, k, slabs[static_cast<std::size_t>(k)]);
  } else {
    for (int k = 0; k < r; ++k) extract_slab(field, iso, k, slabs[static_cast<std::size_t>(k)]);
  }

  std::vector<std::uint64_t> edges;
  std::size_t face_total = 0;
  for (const auto& s : slabs) face_total += s.size();
  edges.reserve(face_total * 3);
  for (const auto& s : slabs)
    for (const auto& t : s) edges.insert(edges.end(), t.begin(), t.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const Grid3 g = field.grid();
  const auto n = static_cast<std::uint64_t>(g.nodes);
  const double h = field.spacing();
  std::vector<Point3> vertices(edges.size());
  for (std::size_t v = 0; v < edges.size(); ++v) {
    const std::uint64_t node = edges[v] / 3;
    const int axis = static_cast<int>(edges[v] % 3);
    const std::uint64_t step = axis == 0 ? 1 : (axis == 1 ? n : n * n);
    const double f0 = field.values[node], f1 = field.values[node + step];
    // Clamping keeps vertices of different edges through a node at exactly iso apart.
    const double t = std::clamp((iso - f0) / (f1 - f0), 1e-6, 1.0 - 1e-6);
    Point3 p{double(node % n) * h, double((node / n) % n) * h, double(node / (n * n)) * h};
    p[axis] += t * h;
    vertices[v] = p;
  }

  const auto vertex_of = [&](std::uint64_t id) {
    return static_cast<std::uint32_t>(std::lower_bound(edges.begin(), edges.end(), id) -
                                      edges.begin());
  };
  std::vector<Triangle> faces;
  faces.reserve(face_total);
  for (const auto& s : slabs)
    for (const auto& t : s) faces.push_back({vertex_of(t[0]), vertex_of(t[1]), vertex_of(t[2])});
  return TriangleMesh(std::move(vertices), std::move(faces));
}

double mean_sample_value(const GridField& field, const SampleSet& samples) {
  if (samples.size() == 0) return 0.0;
  double sum = 0.0;
  for (const auto& p : samples.positions) sum += eval_trilinear(field, p);
  return sum / static_cast<double>(samples.size());
}

}  // namespace ipsr
