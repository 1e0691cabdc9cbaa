// ipsr: reconstruct / orient / evaluate / toy2d front end.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "ipsr/error.hpp"
#include "ipsr/io.hpp"
#include "ipsr/log.hpp"
#include "ipsr/metrics.hpp"
#include "ipsr/parallel.hpp"
#include "ipsr/pipeline.hpp"
#include "ipsr/toy2d.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct ReconstructArgs {
  std::string input;
  std::string output;
  std::string init = "random";
  std::optional<double> final_alpha;
  double trim_dist = 0.0;
  ipsr::IpsrConfig config;
};

void add_pipeline_flags(CLI::App* cmd, ReconstructArgs& a) {
  cmd->add_option("input", a.input, "input point cloud (.ply, .xyz, .obj)")->required();
  cmd->add_option("-o,--output", a.output, "output file")->required();
  cmd->add_option("--depth", a.config.depth, "grid depth, resolution 2^depth");
  cmd->add_option("--alpha", a.config.alpha, "screening weight");
  cmd->add_option("--delta", a.config.delta, "convergence threshold");
  cmd->add_option("--k", a.config.k, "samples linked per face");
  cmd->add_option("--max-iters", a.config.max_iters, "iteration cap");
  cmd->add_option("--init", a.init, "initial normals")->check(CLI::IsMember({"random", "visibility"}));
  cmd->add_option("--seed", a.config.seed, "seed for random initialization");
  cmd->add_option("--final-alpha", a.final_alpha, "screening weight of the final solve");
  cmd->add_option("--dump-iters", a.config.dump_dir, "write per-iteration meshes and report.jsonl here");
  cmd->add_option("--trim-dist", a.trim_dist, "drop output vertices farther than this from the input");
  cmd->add_flag("--deterministic", a.config.deterministic, "single thread, reproducible output");
}

ipsr::IpsrResult run_pipeline(ReconstructArgs& a, std::vector<ipsr::Point3>& points) {
  a.config.init = a.init == "visibility" ? ipsr::InitMode::visibility : ipsr::InitMode::random;
  a.config.final_alpha = a.final_alpha;
  a.config.validate();
  if (!std::filesystem::exists(a.input)) throw ipsr::ConfigError("input file not found: " + a.input);
  points = ipsr::io::read_points(a.input);
  return ipsr::run_ipsr(points, a.config, [](const ipsr::IterationView& v) {
    std::fprintf(stderr, "iter=%d d=%.6g faces=%zu components=%zu\n", v.report.iter, v.report.d,
                 v.report.faces, v.report.components);
  });
}

int cmd_reconstruct(ReconstructArgs& a) {
  std::vector<ipsr::Point3> points;
  auto result = run_pipeline(a, points);
  ipsr::TriangleMesh mesh = std::move(result.mesh);
  if (a.trim_dist > 0.0) mesh = ipsr::trim_far_vertices(mesh, points, a.trim_dist);
  ipsr::io::write_mesh(mesh, a.output);
  if (!result.converged) std::fprintf(stderr, "warning: reached max-iters without converging\n");
  return 0;
}

int cmd_orient(ReconstructArgs& a) {
  std::vector<ipsr::Point3> points;
  const auto result = run_pipeline(a, points);
  std::vector<ipsr::Point3> world;
  world.reserve(result.samples.size());
  for (const auto& p : result.samples.positions) world.push_back(result.transform.to_world(p));
  ipsr::io::write_oriented_points(world, result.samples.normals, a.output);
  return 0;
}

int cmd_evaluate(const std::string& recon, const std::string& reference, std::size_t samples,
                 std::uint64_t seed) {
  for (const auto& p : {recon, reference})
    if (!std::filesystem::exists(p)) throw ipsr::ConfigError("input file not found: " + p);
  const auto a = ipsr::io::read_mesh(recon);
  const auto b = ipsr::io::read_mesh(reference);
  const auto d = ipsr::symmetric_distance(a, b, samples, seed);
  std::printf("mean=%.6g max=%.6g\n", d.mean, d.max);
  return 0;
}

int cmd_toy2d(const std::string& shape, ipsr::toy2d::Config config) {
  using namespace ipsr::toy2d;
  std::vector<Vec2> points;
  if (shape == "ellipse") {
    points = ellipse_points(400, 0.3, 0.18);
    config.truth = [](const Vec2& p) { return ellipse_inward(p, 0.3, 0.18); };
  } else if (shape == "circle") {
    points = circle_points(400, 0.3);
    config.truth = [](const Vec2& p) { return ellipse_inward(p, 0.3, 0.3); };
  } else {
    const Vec2 c0{0.3, 0.5}, c1{0.72, 0.5};
    points = circle_points(200, 0.15, c0);
    const auto second = circle_points(200, 0.15, c1);
    points.insert(points.end(), second.begin(), second.end());
    config.truth = [c0, c1](const Vec2& p) {
      const Vec2 c = norm(p - c0) < norm(p - c1) ? c0 : c1;
      return ellipse_inward(p, 1.0, 1.0, c);
    };
  }
  const auto result = run_ipsr_2d(points, config);
  std::printf("iter=0 inward=%.4f\n", result.initial_inward);
  for (const auto& r : result.reports)
    std::printf("iter=%d d=%.6g segments=%zu loops=%zu inward=%.4f\n", r.iter, r.d, r.segments, r.loops,
                r.inward);
  std::printf("loops=%zu converged=%d\n", result.loops.size(), result.converged ? 1 : 0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative screened Poisson surface reconstruction from unoriented points"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log progress details");

  ReconstructArgs rec, ori;
  auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct a watertight mesh (.ply or .obj)");
  add_pipeline_flags(reconstruct, rec);
  auto* orient = app.add_subcommand("orient", "estimate oriented normals (binary .ply)");
  add_pipeline_flags(orient, ori);

  std::string recon_path, ref_path;
  std::size_t samples = 100000;
  std::uint64_t eval_seed = 0;
  auto* evaluate = app.add_subcommand("evaluate", "symmetric surface distance between two meshes");
  evaluate->add_option("recon", recon_path, "reconstructed mesh")->required();
  evaluate->add_option("reference", ref_path, "reference mesh")->required();
  evaluate->add_option("--samples", samples, "surface samples per direction")->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", eval_seed, "sampling seed");

  std::string shape = "ellipse";
  ipsr::toy2d::Config toy;
  auto* toy2d = app.add_subcommand("toy2d", "2D test bed on a synthetic curve");
  toy2d->add_option("--shape", shape, "ellipse, circle or two-circles")
      ->check(CLI::IsMember({"ellipse", "circle", "two-circles"}));
  toy2d->add_option("--svg", toy.svg_dir, "write per-iteration SVG snapshots here");
  toy2d->add_option("--seed", toy.seed, "seed for random initialization");
  toy2d->add_option("--depth", toy.depth, "grid depth");
  toy2d->add_option("--max-iters", toy.max_iters, "iteration cap");
  toy2d->add_option("--delta", toy.delta, "convergence threshold");
  toy2d->add_option("--k", toy.k, "samples linked per segment");
  toy2d->add_option("--alpha", toy.alpha, "screening weight");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  ipsr::log::set_level(verbose ? ipsr::log::Level::debug : ipsr::log::Level::info);
  ipsr::parallel::thread_count();  // applies IPSR_THREADS

  try {
    if (*reconstruct) return cmd_reconstruct(rec);
    if (*orient) return cmd_orient(ori);
    if (*evaluate) return cmd_evaluate(recon_path, ref_path, samples, eval_seed);
    if (*toy2d) return cmd_toy2d(shape, toy);
  } catch (const ipsr::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ipsr::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
