#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace ipsr {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s; y *= s; z *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

// Positions and directions share the arithmetic type; the names document intent.
using Point3 = Vec3;

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
constexpr double squared_norm(const Vec3& a) { return dot(a, a); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
constexpr double squared_distance(const Vec3& a, const Vec3& b) { return squared_norm(a - b); }

/// Returns a/|a|, or the zero vector when |a| is below `eps`.
inline Vec3 normalized_or_zero(const Vec3& a, double eps = 1e-300) {
  const double n = norm(a);
  return n > eps ? a / n : Vec3{};
}

inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

struct BBox {
  Point3 min;
  Point3 max;

  static BBox of(std::span<const Point3> points);
  Vec3 extent() const { return max - min; }
  Point3 center() const { return (min + max) * 0.5; }
  double diagonal() const { return norm(extent()); }
};

/// Similarity map world -> unit domain: domain = world * scale + offset.
struct DomainTransform {
  double scale = 1.0;
  Vec3 offset;

  Point3 to_domain(const Point3& p) const { return p * scale + offset; }
  Point3 to_world(const Point3& p) const { return (p - offset) / scale; }
};

struct NormalizedCloud {
  std::vector<Point3> points;
  DomainTransform transform;
};

/// Maps the cloud so its longest bbox side spans (1 - 2*padding), centered at (0.5, 0.5, 0.5).
/// Throws GeometryError on empty input or identical points.
NormalizedCloud normalize_to_domain(std::span<const Point3> points, double padding = 0.15);

struct FaceFrame {
  double area = 0.0;
  Vec3 normal;           // zero when degenerate
  bool degenerate = false;
};

/// Area and signed unit normal of a triangle. The normal is orientation_sign * cross/|cross|.
FaceFrame face_area_normal(const Point3& v0, const Point3& v1, const Point3& v2,
                           int orientation_sign = 1);

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh with a per-face (area, inward normal) cache.
///
/// Face winding follows the extractor's convention: the right-hand normal of
/// (v0, v1, v2) points toward increasing indicator value, i.e. inward.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  TriangleMesh(std::vector<Point3> vertices, std::vector<Triangle> faces);

  const std::vector<Point3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& faces() const { return faces_; }
  const std::vector<FaceFrame>& frames() const { return frames_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return faces_.size(); }
  bool empty() const { return faces_.empty(); }

  Point3 centroid(std::size_t face) const;

  /// Applies `fn` to every vertex and rebuilds the face cache.
  template <typename Fn>
  TriangleMesh transformed(Fn&& fn) const {
    std::vector<Point3> v;
    v.reserve(vertices_.size());
    for (const auto& p : vertices_) v.push_back(fn(p));
    return TriangleMesh(std::move(v), faces_);
  }

 private:
  std::vector<Point3> vertices_;
  std::vector<Triangle> faces_;
  std::vector<FaceFrame> frames_;
};

/// Partition of faces by shared-edge connectivity. Components are ordered by
/// their smallest face index; face indices inside a component are ascending.
std::vector<std::vector<std::uint32_t>> connected_components(const TriangleMesh& mesh);

}  // namespace ipsr
