#pragma once

// Planar replica of the iterative reconstruction: 5-point screened Poisson
// solve, marching squares, and length-weighted normal averaging. Used as a
// fast test bed and for figure-style SVG snapshots.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ipsr::toy2d {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};
constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

struct Samples {
  std::vector<Vec2> positions;  // unit square
  std::vector<Vec2> normals;
  std::size_t size() const { return positions.size(); }
};

/// Scalar field on (R+1)^2 nodes over [0,1]^2, zero on the boundary.
struct Field {
  int resolution = 0;
  std::vector<double> values;
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * (resolution + 1) + i]; }
};

/// Oriented iso-curve. Segment a -> b has the region of larger values on its
/// left, so its inward normal is the left normal (-dy, dx) / |d|.
struct Curve {
  std::vector<Vec2> vertices;
  std::vector<std::array<std::uint32_t, 2>> segments;
  bool empty() const { return segments.empty(); }
  double length(std::size_t s) const { return norm(vertices[segments[s][1]] - vertices[segments[s][0]]); }
  Vec2 inward_normal(std::size_t s) const;
  Vec2 midpoint(std::size_t s) const {
    return (vertices[segments[s][0]] + vertices[segments[s][1]]) * 0.5;
  }
};

using NormalField2 = std::function<Vec2(const Vec2&)>;

struct Config {
  int depth = 7;
  double alpha = 10.0;
  double delta = 0.175;
  int k = 10;
  int max_iters = 30;
  std::uint64_t seed = 0;
  double padding = 0.15;
  double solver_tol = 1e-7;
  std::string svg_dir;   // per-iteration snapshots when non-empty
  NormalField2 truth;    // optional true inward normal in input coordinates
  NormalField2 init;     // replaces random initialization when set
};

struct Report {
  int iter = 0;
  double d = 0.0;
  std::size_t segments = 0;
  std::size_t loops = 0;
  double iso = 0.0;
  double inward = -1.0;  // -1 without a truth field
};

struct Result {
  Curve curve;                                   // input coordinates
  std::vector<std::vector<std::uint32_t>> loops; // vertex cycles of `curve`
  Samples samples;                               // unit square, final normals
  std::vector<Report> reports;
  double initial_inward = -1.0;
  bool converged = false;
};

/// Similarity into the unit square (longest side 1 - 2 * padding, centred).
struct Transform2 {
  double scale = 1.0;
  Vec2 offset;
  Vec2 to_domain(Vec2 p) const { return p * scale + offset; }
  Vec2 to_world(Vec2 p) const { return (p - offset) * (1.0 / scale); }
};
Transform2 fit_unit_square(std::span<const Vec2> points, double padding);

Samples build_samples(std::span<const Vec2> points, int depth);
Samples random_init(Samples s, std::uint64_t seed);

Field solve(const Samples& s, int resolution, double alpha, double tol);
double eval_bilinear(const Field& f, Vec2 p);
double mean_sample_value(const Field& f, const Samples& s);

/// Returns an empty curve when iso is outside the value range.
Curve marching_squares(const Field& f, double iso);

/// Vertex cycles of a curve; throws when some vertex does not have exactly
/// one incoming and one outgoing segment.
std::vector<std::vector<std::uint32_t>> closed_loops(const Curve& c);

/// Links every segment to its k nearest samples and replaces each normal by
/// the length-weighted sum of inward segment normals (kept when empty).
Samples update_normals(Samples s, const Curve& c, int k);

Result run_ipsr_2d(std::span<const Vec2> points, const Config& config);

/// Snapshot with iso-curve loops and sample normal glyphs.
void write_svg(const std::string& path, const Curve& curve, const Samples& samples);

// Fixtures -----------------------------------------------------------------

std::vector<Vec2> ellipse_points(std::size_t n, double a, double b, Vec2 center = {0.5, 0.5});
std::vector<Vec2> circle_points(std::size_t n, double r, Vec2 center = {0.5, 0.5});
/// Inward normal of the ellipse level set through p.
Vec2 ellipse_inward(Vec2 p, double a, double b, Vec2 center = {0.5, 0.5});

}  // namespace ipsr::toy2d
