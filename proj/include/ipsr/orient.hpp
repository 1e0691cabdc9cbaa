#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ipsr/geometry.hpp"
#include "ipsr/kdtree.hpp"
#include "ipsr/kernels.hpp"
#include "ipsr/sampling.hpp"

namespace ipsr {

/// For every sample, the ascending list of iso-surface faces linked to it.
struct FaceLink {
  std::vector<std::uint32_t> offsets;  // CSR: faces of sample i are [offsets[i], offsets[i+1])
  std::vector<std::uint32_t> faces;

  std::size_t sample_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::span<const std::uint32_t> of(std::size_t sample) const {
    return {faces.data() + offsets[sample], faces.data() + offsets[sample + 1]};
  }
};

/// Links every face to the k samples nearest to its centroid.
FaceLink link_faces(const TriangleMesh& mesh, const KdTree& samples, int k,
                    kernels::Exec exec = kernels::Exec::parallel);

/// Area-weighted average of linked inward face normals. Degenerate faces are
/// skipped; samples with no usable faces or a vanishing sum keep their normal.
SampleSet update_normals(SampleSet samples, const TriangleMesh& mesh, const FaceLink& links,
                         kernels::Exec exec = kernels::Exec::parallel);

struct ConvergenceStat {
  double d = 0.0;
  std::vector<double> changes;  // |n_cur - n_prev| per sample
};

/// Mean of the largest ceil(fraction * n) entries (at least one). Shared by the
/// 2D test bed, which measures changes in its own dimension.
double top_fraction_mean(std::span<const double> changes, double fraction = 0.001);

ConvergenceStat convergence_stat(const SampleSet& prev, const SampleSet& cur);

/// The 26 viewpoints on the cube of edge 3 concentric with the unit domain.
std::vector<Point3> visibility_viewpoints();

/// Hidden point removal: which samples a viewpoint sees. Points are
/// spherically flipped about the viewpoint with radius
/// 10^radius_exponent * max distance; hull vertices of the flipped set plus
/// the viewpoint are visible.
std::vector<bool> hpr_visible(std::span<const Point3> points, const Point3& viewpoint,
                              double radius_exponent);

/// Normals from the average unit direction viewpoint -> sample over all
/// viewpoints that see the sample; unseen samples get (1, 0, 0). Falls back to
/// random_init(seed 0) with a warning when the samples span no volume.
SampleSet visibility_init(SampleSet samples, double radius_exponent = 3.0);

}  // namespace ipsr
