#include "ipsr/orient.hpp"

#include <algorithm>
#include <cmath>

#include "ipsr/error.hpp"
#include "ipsr/hull.hpp"
#include "ipsr/log.hpp"

namespace ipsr {

using kernels::Exec;

FaceLink link_faces(const TriangleMesh& mesh, const KdTree& tree, int k, Exec exec) {
  if (k < 1) throw ConfigError("k must be >= 1");
  const std::size_t n = tree.size();
  const auto f_count = static_cast<std::ptrdiff_t>(mesh.face_count());
  const std::size_t per_face = std::min<std::size_t>(static_cast<std::size_t>(k), n);

  std::vector<std::uint32_t> nearest(static_cast<std::size_t>(f_count) * per_face);
  const auto query = [&](std::ptrdiff_t f, std::vector<std::uint32_t>& buf) {
    tree.knn_indices(mesh.centroid(static_cast<std::size_t>(f)), k, buf);
    std::copy(buf.begin(), buf.end(), nearest.begin() + f * static_cast<std::ptrdiff_t>(per_face));
  };
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<std::uint32_t> buf;
#pragma omp for schedule(static)
      for (std::ptrdiff_t f = 0; f < f_count; ++f) query(f, buf);
    }
  } else {
    std::vector<std::uint32_t> buf;
    for (std::ptrdiff_t f = 0; f < f_count; ++f) query(f, buf);
  }

  // Counting sort by sample; faces stay ascending within each bucket.
  FaceLink links;
  links.offsets.assign(n + 1, 0);
  for (auto s : nearest) ++links.offsets[s + 1];
  for (std::size_t i = 0; i < n; ++i) links.offsets[i + 1] += links.offsets[i];
  links.faces.resize(nearest.size());
  std::vector<std::uint32_t> cursor(links.offsets.begin(), links.offsets.end() - 1);
  for (std::size_t f = 0; f < static_cast<std::size_t>(f_count); ++f)
    for (std::size_t j = 0; j < per_face; ++j)
      links.faces[cursor[nearest[f * per_face + j]]++] = static_cast<std::uint32_t>(f);
  return links;
}

SampleSet update_normals(SampleSet samples, const TriangleMesh& mesh, const FaceLink& links,
                         Exec exec) {
  const auto& frames = mesh.frames();
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  if (links.sample_count() != samples.size())
    throw ConfigError("face links do not match the sample set");
  const auto update = [&](std::ptrdiff_t i) {
    Vec3 sum;
    for (auto f : links.of(static_cast<std::size_t>(i))) {
      const auto& fr = frames[f];
      if (fr.degenerate) continue;
      sum += fr.normal * fr.area;
    }
    const double len = norm(sum);
    if (len >= 1e-12) samples.normals[static_cast<std::size_t>(i)] = sum / len;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) update(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) update(i);
  }
  return samples;
}

double top_fraction_mean(std::span<const double> changes, double fraction) {
  if (changes.empty()) return 0.0;
  const auto take = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(changes.size()))), 1,
      changes.size());
  std::vector<double> sorted(changes.begin(), changes.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(take - 1),
                   sorted.end(), std::greater<>());
  // The top `take` entries now precede the pivot (in arbitrary order); sum
  // them in sorted order so the result is independent of the partition.
  std::sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(take), std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += sorted[i];
  return sum / static_cast<double>(take);
}

ConvergenceStat convergence_stat(const SampleSet& prev, const SampleSet& cur) {
  if (prev.size() != cur.size()) throw ConfigError("sample count mismatch in convergence test");
  ConvergenceStat st;
  st.changes.resize(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i)
    st.changes[i] = norm(cur.normals[i] - prev.normals[i]);
  st.d = top_fraction_mean(st.changes);
  return st;
}

std::vector<Point3> visibility_viewpoints() {
  std::vector<Point3> views;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        views.push_back({0.5 + 1.5 * dx, 0.5 + 1.5 * dy, 0.5 + 1.5 * dz});
      }
  return views;
}

std::vector<bool> hpr_visible(std::span<const Point3> points, const Point3& viewpoint,
                              double radius_exponent) {
  std::vector<Point3> flipped;
  flipped.reserve(points.size() + 1);
  double max_len = 0.0;
  for (const auto& p : points) max_len = std::max(max_len, distance(p, viewpoint));
  const double radius = std::pow(10.0, radius_exponent) * max_len;
  for (const auto& p : points) {
    const Vec3 q = p - viewpoint;
    const double len = norm(q);
    flipped.push_back(len > 0.0 ? q + q * (2.0 * (radius - len) / len) : q);
  }
  flipped.push_back({0.0, 0.0, 0.0});
  std::vector<bool> visible(points.size(), false);
  for (auto idx : quickhull3(flipped))
    if (idx < points.size()) visible[idx] = true;
  return visible;
}

SampleSet visibility_init(SampleSet samples, double radius_exponent) {
  const auto fallback = [&](const char* why) {
    log::warn(std::string("visibility initialization unavailable (") + why +
              "); using random normals with seed 0");
    return random_init(std::move(samples), 0);
  };
  if (samples.size() < 4) return fallback("fewer than 4 samples");

  std::vector<Vec3> sum(samples.size());
  try {
    quickhull3(samples.positions);  // rejects coplanar input
    for (const auto& view : visibility_viewpoints()) {
      const auto visible = hpr_visible(samples.positions, view, radius_exponent);
      for (std::size_t i = 0; i < samples.size(); ++i)
        if (visible[i]) sum[i] += normalized_or_zero(samples.positions[i] - view);
    }
  } catch (const GeometryError&) {
    return fallback("samples are coplanar");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double len = norm(sum[i]);
    samples.normals[i] = len > 1e-12 ? sum[i] / len : Vec3{1.0, 0.0, 0.0};
  }
  return samples;
}

}  // namespace ipsr
