#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ipsr/geometry.hpp"

namespace ipsr {

inline constexpr int kMinDepth = 4;
inline constexpr int kMaxDepth = 10;

/// Oriented samples in the unit domain; one per occupied finest-level cell.
struct SampleSet {
  std::vector<Point3> positions;
  std::vector<Vec3> normals;                 // zero until initialized
  std::vector<std::uint32_t> source_counts;  // raw input points per sample
  std::size_t raw_count = 0;                 // m

  std::size_t size() const { return positions.size(); }
};

/// Bins normalized points into the 2^depth grid; each occupied cell yields
/// one sample at the centroid of its points. Samples are ordered by cell key.
SampleSet build_samples(std::span<const Point3> points, int depth);

/// Independent uniform-on-sphere normals from a seeded generator.
SampleSet random_init(SampleSet samples, std::uint64_t seed);

}  // namespace ipsr
