#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ipsr/geometry.hpp"
#include "ipsr/sampling.hpp"

namespace ipsr {

/// Axis-aligned bounding-volume hierarchy over mesh triangles for exact
/// point-to-surface distance queries.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriangleMesh& mesh);

  /// Distance from p to the closest point on the mesh.
  double distance(const Point3& p) const;

 private:
  struct Node {
    Point3 lo, hi;
    std::int32_t left = -1, right = -1;
    std::uint32_t begin = 0, end = 0;
  };
  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void query(std::int32_t node, const Point3& p, double& best2) const;

  const TriangleMesh& mesh_;
  std::vector<std::uint32_t> tris_;
  std::vector<Point3> centroids_;
  std::vector<Node> nodes_;
};

/// Closest point on triangle (a, b, c) to p.
Point3 closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b, const Point3& c);

/// `count` points distributed uniformly by area over the mesh surface.
std::vector<Point3> sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed);

struct SurfaceDistance {
  double mean = 0.0;  // both directions pooled, divided by the scale
  double max = 0.0;
};

/// Sampled symmetric surface distance, normalized by `scale` (defaults to the
/// reference bounding-box diagonal when scale <= 0).
SurfaceDistance symmetric_distance(const TriangleMesh& recon, const TriangleMesh& reference,
                                   std::size_t samples_per_direction = 100000,
                                   std::uint64_t seed = 0, double scale = 0.0);

using NormalField = std::function<Vec3(const Point3&)>;

/// Fraction of samples whose normal has a positive dot product with `truth`.
double inward_fraction(const SampleSet& samples, const NormalField& truth);

struct Topology {
  bool closed = false;  // every edge has exactly two incident faces
  long long euler = 0;  // V - E + F over referenced vertices
  std::size_t components = 0;
};

Topology topology_check(const TriangleMesh& mesh);

}  // namespace ipsr
