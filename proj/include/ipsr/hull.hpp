#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ipsr/geometry.hpp"

namespace ipsr {

/// Vertex indices (ascending) of the 3D convex hull of `points`.
///
/// Points within 1e-10 * bbox diagonal of a hull facet plane are treated as
/// lying on or inside it and are not reported. Throws GeometryError when
/// fewer than 4 points are given or all points are coplanar.
std::vector<std::uint32_t> quickhull3(std::span<const Point3> points);

}  // namespace ipsr
