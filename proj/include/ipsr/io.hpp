#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ipsr/geometry.hpp"

namespace ipsr::io {

/// Reads point positions from .xyz, .ply (ascii / binary little endian) or .obj.
/// Normals and other attributes are skipped (a notice is logged for normals).
std::vector<Point3> read_points(const std::filesystem::path& path);

/// Reads a triangle mesh from .ply or .obj. Polygons are fanned into triangles.
TriangleMesh read_mesh(const std::filesystem::path& path);

/// Writes binary little-endian PLY (double xyz, uchar/int32 face lists) or OBJ
/// (1-based indices), chosen by extension. Output is byte-deterministic.
void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

struct OrientedPoints {
  std::vector<Point3> positions;
  std::vector<Vec3> normals;
};

/// Binary little-endian PLY with double x y z nx ny nz.
void write_oriented_points(std::span<const Point3> positions, std::span<const Vec3> normals,
                           const std::filesystem::path& path);
OrientedPoints read_oriented_points(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path` on success.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

/// Throws IoError when some vertex index would exceed 2^31 - 1.
void check_face_index_range(std::size_t vertex_count);

std::string encode_mesh_ply(const TriangleMesh& mesh);
std::string encode_mesh_obj(const TriangleMesh& mesh);
std::string encode_oriented_points_ply(std::span<const Point3> positions,
                                       std::span<const Vec3> normals);

}  // namespace ipsr::io
