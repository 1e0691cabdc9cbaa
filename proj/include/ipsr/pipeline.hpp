#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ipsr/geometry.hpp"
#include "ipsr/poisson.hpp"
#include "ipsr/sampling.hpp"

namespace ipsr {

enum class InitMode { random, visibility };

struct IpsrConfig {
  int depth = 7;          // grid resolution 2^depth per axis
  double alpha = 10.0;    // screening weight, constant across iterations
  double delta = 0.175;   // convergence threshold on the top-0.1% normal change
  int k = 10;             // samples linked to each face
  int max_iters = 30;
  InitMode init = InitMode::random;
  std::uint64_t seed = 0;
  double hpr_radius_exponent = 3.0;
  double padding = 0.15;
  double solver_tol = 1e-7;
  int max_cg_iters = 0;   // 0 selects 10 * 2^depth
  std::optional<double> final_alpha;
  bool deterministic = false;
  bool warm_start = true;  // seed each solve with the previous indicator
  std::string dump_dir;    // per-iteration mesh/normals/report when non-empty

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct IterationReport {
  int iter = 0;
  double d = 0.0;
  std::size_t faces = 0;
  std::size_t components = 0;
  double iso = 0.0;
  double ms = 0.0;
  int solver_iterations = 0;
};

/// State handed to the per-iteration observer after the normal update.
struct IterationView {
  const IterationReport& report;
  const SampleSet& samples;     // updated normals, unit domain
  const TriangleMesh& surface;  // extracted iso-surface, unit domain
};
using IterationObserver = std::function<void(const IterationView&)>;

struct IpsrResult {
  TriangleMesh mesh;          // world coordinates
  SampleSet samples;          // unit domain, final normals
  DomainTransform transform;
  std::vector<IterationReport> reports;
  bool converged = false;
};

struct PreparedSamples {
  SampleSet samples;
  DomainTransform transform;
};

/// Normalizes the cloud into the unit domain and bins it at config.depth.
PreparedSamples prepare_samples(std::span<const Point3> points, const IpsrConfig& config);

/// Random or visibility-based initial normals.
SampleSet init_normals(SampleSet samples, const IpsrConfig& config);

/// Runs the iteration from already-initialized samples.
IpsrResult run_ipsr_from(PreparedSamples prepared, const IpsrConfig& config,
                         const IterationObserver& observer = {});

/// Full pipeline: normalize, bin, initialize, iterate, final solve and extraction.
IpsrResult run_ipsr(std::span<const Point3> points, const IpsrConfig& config,
                    const IterationObserver& observer = {});

/// One report as a single-line JSON object (keys iter, d, faces, components, iso, ms).
std::string report_json(const IterationReport& r);

/// Removes vertices farther than `max_distance` from every point, with their faces.
TriangleMesh trim_far_vertices(const TriangleMesh& mesh, std::span<const Point3> points,
                               double max_distance);

}  // namespace ipsr
