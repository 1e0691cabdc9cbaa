#include "ipsr/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "ipsr/error.hpp"
#include "ipsr/io.hpp"
#include "ipsr/isosurface.hpp"
#include "ipsr/kdtree.hpp"
#include "ipsr/log.hpp"
#include "ipsr/orient.hpp"
#include "ipsr/parallel.hpp"

namespace ipsr {

namespace {

constexpr int kCollapseTolerance = 3;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

class IterationDumper {
 public:
  IterationDumper(const std::string& dir, const DomainTransform& t) : transform_(t) {
    if (dir.empty()) return;
    dir_ = dir;
    std::filesystem::create_directories(dir_);
    jsonl_.open(dir_ / "report.jsonl", std::ios::trunc);
    if (!jsonl_) throw IoError("cannot write " + (dir_ / "report.jsonl").string());
  }

  void dump(const IterationReport& r, const TriangleMesh& surface, const SampleSet& samples) {
    if (dir_.empty()) return;
    const auto to_world = [this](const Point3& p) { return transform_.to_world(p); };
    io::write_mesh(surface.transformed(to_world), dir_ / ("iter_" + std::to_string(r.iter) + ".ply"));
    std::vector<Point3> world;
    world.reserve(samples.size());
    for (const auto& p : samples.positions) world.push_back(to_world(p));
    io::write_oriented_points(world, samples.normals,
                              dir_ / ("iter_" + std::to_string(r.iter) + "_normals.ply"));
    jsonl_ << report_json(r) << '\n';
    jsonl_.flush();
  }

 private:
  std::filesystem::path dir_;
  std::ofstream jsonl_;
  DomainTransform transform_;
};

}  // namespace

void IpsrConfig::validate() const {
  require(depth >= kMinDepth && depth <= kMaxDepth,
          "depth must be in [" + std::to_string(kMinDepth) + ", " + std::to_string(kMaxDepth) +
              "], got " + std::to_string(depth));
  require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be a finite value >= 0");
  require(delta > 0.0 && std::isfinite(delta), "delta must be > 0");
  require(k >= 1, "k must be >= 1");
  require(max_iters >= 1 && max_iters <= 1000, "max-iters must be in [1, 1000]");
  require(padding > 0.0 && padding < 0.5, "padding must be in (0, 0.5)");
  require(solver_tol > 0.0, "solver tolerance must be > 0");
  require(max_cg_iters >= 0, "max_cg_iters must be >= 0");
  require(std::isfinite(hpr_radius_exponent), "HPR radius exponent must be finite");
  if (final_alpha) require(*final_alpha >= 0.0 && std::isfinite(*final_alpha),
                           "final-alpha must be a finite value >= 0");
}

PreparedSamples prepare_samples(std::span<const Point3> points, const IpsrConfig& config) {
  config.validate();
  if (points.size() < 4) throw GeometryError("at least 4 input points are required");
  auto cloud = normalize_to_domain(points, config.padding);
  return {build_samples(cloud.points, config.depth), cloud.transform};
}

SampleSet init_normals(SampleSet samples, const IpsrConfig& config) {
  switch (config.init) {
    case InitMode::visibility:
      return visibility_init(std::move(samples), config.hpr_radius_exponent);
    case InitMode::random:
    default:
      return random_init(std::move(samples), config.seed);
  }
}

IpsrResult run_ipsr_from(PreparedSamples prepared, const IpsrConfig& config,
                         const IterationObserver& observer) {
  config.validate();
  std::unique_ptr<parallel::ThreadLimit> single_thread;
  if (config.deterministic) single_thread = std::make_unique<parallel::ThreadLimit>(1);

  const int resolution = 1 << config.depth;
  SampleSet samples = std::move(prepared.samples);
  const KdTree tree(samples.positions);
  IterationDumper dumper(config.dump_dir, prepared.transform);

  SolverOptions opts;
  opts.alpha = config.alpha;
  opts.tol = config.solver_tol;
  opts.max_iters = config.max_cg_iters;

  IpsrResult result;
  result.transform = prepared.transform;
  GridField chi;
  int empty_streak = 0;

  for (int it = 1; it <= config.max_iters; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    opts.initial_guess = config.warm_start && !chi.values.empty() ? &chi.values : nullptr;
    SolveStats stats;
    GridField next_chi = solve_screened(samples, resolution, opts, &stats);
    chi = std::move(next_chi);

    IterationReport report;
    report.iter = it;
    report.solver_iterations = stats.iterations;
    report.iso = mean_sample_value(chi, samples);
    const TriangleMesh surface = marching_cubes(chi, report.iso);
    report.faces = surface.face_count();

    bool eligible = it > 1;
    if (surface.empty()) {
      // Nothing to learn from; keep the normals and do not test convergence.
      if (++empty_streak >= kCollapseTolerance) {
        std::ostringstream msg;
        msg << "field collapsed: empty iso-surface on " << empty_streak
            << " consecutive iterations (last iso " << report.iso << ")";
        throw CollapseError(msg.str());
      }
      eligible = false;
    } else {
      empty_streak = 0;
      const auto links = link_faces(surface, tree, config.k);
      SampleSet updated = update_normals(samples, surface, links);
      report.d = convergence_stat(samples, updated).d;
      report.components = connected_components(surface).size();
      samples = std::move(updated);
    }
    report.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.reports.push_back(report);

    if (observer) observer(IterationView{report, samples, surface});
    dumper.dump(report, surface, samples);

    if (eligible && report.d < config.delta) {
      result.converged = true;
      break;
    }
  }

  opts.alpha = config.final_alpha.value_or(config.alpha);
  opts.initial_guess = config.warm_start && !chi.values.empty() ? &chi.values : nullptr;
  const GridField final_chi = solve_screened(samples, resolution, opts);
  const TriangleMesh final_surface = marching_cubes(final_chi, mean_sample_value(final_chi, samples));
  if (final_surface.empty()) throw CollapseError("field collapsed: final extraction is empty");

  const auto transform = prepared.transform;
  result.mesh = final_surface.transformed([&](const Point3& p) { return transform.to_world(p); });
  result.samples = std::move(samples);
  return result;
}

IpsrResult run_ipsr(std::span<const Point3> points, const IpsrConfig& config,
                    const IterationObserver& observer) {
  auto prepared = prepare_samples(points, config);
  prepared.samples = init_normals(std::move(prepared.samples), config);
  return run_ipsr_from(std::move(prepared), config, observer);
}

std::string report_json(const IterationReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"iter\":" << r.iter << ",\"d\":" << r.d << ",\"faces\":" << r.faces
     << ",\"components\":" << r.components << ",\"iso\":" << r.iso << ",\"ms\":" << r.ms << "}";
  return os.str();
}

TriangleMesh trim_far_vertices(const TriangleMesh& mesh, std::span<const Point3> points,
                               double max_distance) {
  if (mesh.empty() || points.empty()) return mesh;
  const KdTree tree(points);
  std::vector<std::int64_t> remap(mesh.vertex_count(), -1);
  std::vector<Point3> kept;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    if (tree.knn(mesh.vertices()[v], 1).front().distance <= max_distance) {
      remap[v] = static_cast<std::int64_t>(kept.size());
      kept.push_back(mesh.vertices()[v]);
    }
  }
  std::vector<Triangle> faces;
  for (const auto& t : mesh.faces()) {
    if (remap[t[0]] < 0 || remap[t[1]] < 0 || remap[t[2]] < 0) continue;
    faces.push_back({static_cast<std::uint32_t>(remap[t[0]]), static_cast<std::uint32_t>(remap[t[1]]),
                     static_cast<std::uint32_t>(remap[t[2]])});
  }
  // Drop vertices that lost all their faces.
  std::vector<std::int64_t> used(kept.size(), -1);
  std::vector<Point3> compact;
  for (auto& t : faces)
    for (auto& idx : t) {
      if (used[idx] < 0) {
        used[idx] = static_cast<std::int64_t>(compact.size());
        compact.push_back(kept[idx]);
      }
      idx = static_cast<std::uint32_t>(used[idx]);
    }
  return TriangleMesh(std::move(compact), std::move(faces));
}

}  // namespace ipsr
