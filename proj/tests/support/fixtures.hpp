#pragma once

// Synthetic shapes shared by the unit tests, acceptance suite and benchmark.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "ipsr/geometry.hpp"
#include "ipsr/poisson.hpp"
#include "ipsr/sampling.hpp"

namespace fixtures {

using ipsr::Point3;
using ipsr::Vec3;

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    if (const double n = ipsr::norm(v); n > 1e-9) return v / n;
  }
}

inline std::vector<Point3> sphere_points(std::size_t n, std::uint64_t seed, double radius = 1.0,
                                         Point3 center = {}) {
  std::mt19937_64 rng(seed);
  std::vector<Point3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(center + random_unit(rng) * radius);
  return pts;
}

/// Area-uniform samples on a torus around the z axis.
inline std::vector<Point3> torus_points(std::size_t n, std::uint64_t seed, double major = 1.0,
                                        double minor = 0.4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi), w(0.0, 1.0);
  std::vector<Point3> pts;
  pts.reserve(n);
  while (pts.size() < n) {
    const double a = u(rng), b = u(rng);
    if (w(rng) > (major + minor * std::cos(b)) / (major + minor)) continue;
    const double ring = major + minor * std::cos(b);
    pts.push_back({ring * std::cos(a), ring * std::sin(a), minor * std::sin(b)});
  }
  return pts;
}

inline std::vector<Point3> ellipsoid_points(std::size_t n, std::uint64_t seed, Vec3 axes = {1.0, 0.7, 0.5}) {
  std::mt19937_64 rng(seed);
  std::vector<Point3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 d = random_unit(rng);
    pts.push_back({d.x * axes.x, d.y * axes.y, d.z * axes.z});
  }
  return pts;
}

// Inward directions (true interior side) in the shapes' own coordinates.

inline Vec3 sphere_inward(const Point3& p, Point3 center = {}) {
  return ipsr::normalized_or_zero(center - p);
}

inline Vec3 torus_inward(const Point3& p, double major = 1.0) {
  const double rho = std::hypot(p.x, p.y);
  const Point3 core = rho > 0 ? Point3{p.x / rho * major, p.y / rho * major, 0.0} : Point3{major, 0, 0};
  return ipsr::normalized_or_zero(core - p);
}

inline Vec3 ellipsoid_inward(const Point3& p, Vec3 axes = {1.0, 0.7, 0.5}) {
  return ipsr::normalized_or_zero(
      Vec3{-p.x / (axes.x * axes.x), -p.y / (axes.y * axes.y), -p.z / (axes.z * axes.z)});
}

/// Icosphere with `levels` midpoint subdivisions, outward-wound.
inline ipsr::TriangleMesh icosphere(int levels, double radius = 1.0, Point3 center = {}) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Point3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p = ipsr::normalized_or_zero(p);
  std::vector<ipsr::Triangle> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7}, {9, 8, 1}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    const auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back(ipsr::normalized_or_zero((v[a] + v[b]) * 0.5));
      const auto id = static_cast<std::uint32_t>(v.size() - 1);
      mid.emplace(key, id);
      return id;
    };
    std::vector<ipsr::Triangle> next;
    for (const auto& tri : f) {
      const auto a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]), c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  for (auto& p : v) p = center + p * radius;
  return {std::move(v), std::move(f)};
}

/// Parametric torus mesh (closed, genus 1).
inline ipsr::TriangleMesh torus_mesh(int nu, int nv, double major = 1.0, double minor = 0.4) {
  std::vector<Point3> v;
  std::vector<ipsr::Triangle> f;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double a = 2 * std::numbers::pi * i / nu, b = 2 * std::numbers::pi * j / nv;
      const double ring = major + minor * std::cos(b);
      v.push_back({ring * std::cos(a), ring * std::sin(a), minor * std::sin(b)});
    }
  const auto id = [&](int i, int j) { return static_cast<std::uint32_t>(((i + nu) % nu) * nv + (j + nv) % nv); };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return {std::move(v), std::move(f)};
}

/// Grid field sampled from f at every node (boundary nodes included).
template <class F>
ipsr::GridField sample_field(int resolution, F&& f) {
  ipsr::GridField g;
  g.resolution = resolution;
  const int n = resolution + 1;
  g.values.resize(static_cast<std::size_t>(n) * n * n);
  const double h = 1.0 / resolution;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        g.values[(static_cast<std::size_t>(k) * n + j) * n + i] = f(Point3{i * h, j * h, k * h});
  return g;
}

/// Samples with exact inward normals for a shape given in the unit domain.
template <class F>
ipsr::SampleSet with_normals(ipsr::SampleSet s, F&& inward) {
  for (std::size_t i = 0; i < s.size(); ++i) s.normals[i] = inward(s.positions[i]);
  return s;
}

}  // namespace fixtures
