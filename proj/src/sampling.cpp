#include "ipsr/sampling.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "ipsr/error.hpp"

namespace ipsr {

SampleSet build_samples(std::span<const Point3> points, int depth) {
  if (depth < kMinDepth || depth > kMaxDepth)
    throw ConfigError("depth must be in [" + std::to_string(kMinDepth) + ", " +
                      std::to_string(kMaxDepth) + "], got " + std::to_string(depth));
  if (points.empty()) throw GeometryError("empty point cloud");

  const std::int64_t res = std::int64_t{1} << depth;
  struct Keyed {
    std::uint64_t key;
    std::uint32_t index;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(points.size());
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0 && p.z > 0.0 && p.z < 1.0))
      throw GeometryError("point " + std::to_string(i) + " lies outside the open unit domain");
    std::uint64_t key = 0;
    for (int a = 2; a >= 0; --a) {
      const auto c = std::clamp<std::int64_t>(static_cast<std::int64_t>(p[a] * res), 0, res - 1);
      key = key * static_cast<std::uint64_t>(res) + static_cast<std::uint64_t>(c);
    }
    keyed.push_back({key, i});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return a.key != b.key ? a.key < b.key : a.index < b.index;
  });

  SampleSet s;
  s.raw_count = points.size();
  for (std::size_t lo = 0; lo < keyed.size();) {
    std::size_t hi = lo;
    Vec3 sum;
    while (hi < keyed.size() && keyed[hi].key == keyed[lo].key) sum += points[keyed[hi++].index];
    const auto count = static_cast<std::uint32_t>(hi - lo);
    s.positions.push_back(sum / static_cast<double>(count));
    s.source_counts.push_back(count);
    lo = hi;
  }
  s.normals.assign(s.positions.size(), Vec3{});
  return s;
}

SampleSet random_init(SampleSet samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& n : samples.normals) {
    Vec3 g;
    double len = 0.0;
    do {
      g = {gauss(rng), gauss(rng), gauss(rng)};
      len = norm(g);
    } while (len < 1e-12);
    n = g / len;
  }
  return samples;
}

}  // namespace ipsr
