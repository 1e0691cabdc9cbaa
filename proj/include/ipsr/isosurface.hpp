#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ipsr/geometry.hpp"
#include "ipsr/kernels.hpp"
#include "ipsr/poisson.hpp"
#include "ipsr/sampling.hpp"

namespace ipsr {

/// Per-configuration triangulation for a unit cube.
///
/// Corner c has offset (c & 1, (c >> 1) & 1, (c >> 2) & 1); a corner is
/// "inside" when its value exceeds the iso-value. Triangles list cube-edge ids
/// (0-3 along x, 4-7 along y, 8-11 along z) wound so the right-hand normal
/// points toward the inside corners.
struct CubeCase {
  std::vector<std::array<std::uint8_t, 3>> triangles;
};

const std::array<CubeCase, 256>& cube_case_table();

/// Endpoints (corner ids) of cube edge e.
std::array<int, 2> cube_edge_corners(int e);

/// Marching cubes at `iso`. Vertices are welded by grid edge and indexed in
/// ascending edge order; faces are ordered by cell index, so the output does
/// not depend on the thread count. Returns an empty mesh when `iso` is outside
/// the field's value range.
TriangleMesh marching_cubes(const GridField& field, double iso,
                            kernels::Exec exec = kernels::Exec::parallel);

/// Mean trilinear value of the field at the sample positions.
double mean_sample_value(const GridField& field, const SampleSet& samples);

}  // namespace ipsr
