// Serial reference vs OpenMP kernels. Arg 0 selects serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "ipsr/isosurface.hpp"
#include "ipsr/kdtree.hpp"
#include "ipsr/kernels.hpp"
#include "ipsr/orient.hpp"
#include "ipsr/poisson.hpp"

using namespace ipsr;
using kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

std::vector<double> interior_noise(const kernels::Grid3& g) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(g.size(), 0.0);
  for (int k = 1; k + 1 < g.nodes; ++k)
    for (int j = 1; j + 1 < g.nodes; ++j)
      for (int i = 1; i + 1 < g.nodes; ++i) x[g.index(i, j, k)] = u(rng);
  return x;
}

GridField sphere_field(int r) {
  GridField f(r);
  for (int k = 0; k <= r; ++k)
    for (int j = 0; j <= r; ++j)
      for (int i = 0; i <= r; ++i) {
        const double x = double(i) / r - 0.5, y = double(j) / r - 0.5, z = double(k) / r - 0.5;
        f.at(i, j, k) = 0.3 - std::sqrt(x * x + y * y + z * z);
      }
  return f;
}

void BM_Laplacian(benchmark::State& state) {
  const kernels::Grid3 g{129};
  const auto x = interior_noise(g);
  std::vector<double> y(g.size());
  for (auto _ : state) {
    kernels::apply_laplacian(exec_of(state), g, 1.0 / 128, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_SmoothAxis(benchmark::State& state) {
  const kernels::Grid3 g{129};
  const auto x = interior_noise(g);
  std::vector<double> y(g.size());
  for (auto _ : state) {
    kernels::smooth_axis(exec_of(state), g, 1, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_Dot(benchmark::State& state) {
  const kernels::Grid3 g{129};
  const auto x = interior_noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(exec_of(state), x, x));
}

void BM_MarchingCubes(benchmark::State& state) {
  const auto field = sphere_field(128);
  for (auto _ : state) benchmark::DoNotOptimize(marching_cubes(field, 0.0, exec_of(state)));
}

void BM_LinkFaces(benchmark::State& state) {
  const auto mesh = marching_cubes(sphere_field(128), 0.0);
  const KdTree tree(mesh.vertices());
  for (auto _ : state) benchmark::DoNotOptimize(link_faces(mesh, tree, 10, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_Laplacian)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmoothAxis)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dot)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MarchingCubes)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinkFaces)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
