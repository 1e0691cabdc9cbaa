#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "ipsr/error.hpp"
#include "ipsr/isosurface.hpp"
#include "ipsr/poisson.hpp"

using namespace ipsr;
using kernels::Exec;

namespace {

const Point3 kCenter{0.5, 0.5, 0.5};

SampleSet sphere_samples(std::size_t n, int depth, double radius, std::uint64_t seed = 1) {
  auto pts = fixtures::sphere_points(n, seed, radius, kCenter);
  return fixtures::with_normals(build_samples(pts, depth),
                                [](const Point3& p) { return fixtures::sphere_inward(p, kCenter); });
}

std::vector<double> random_interior_field(int r, std::uint64_t seed) {
  const kernels::Grid3 g{r + 1};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(g.size(), 0.0);
  for (int k = 1; k < g.nodes - 1; ++k)
    for (int j = 1; j < g.nodes - 1; ++j)
      for (int i = 1; i < g.nodes - 1; ++i) v[g.index(i, j, k)] = u(rng);
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double manufactured_error(int r, SolveStats* stats) {
  const double pi = std::numbers::pi;
  const auto exact = [&](const Point3& p) { return std::sin(pi * p.x) * std::sin(pi * p.y) * std::sin(pi * p.z); };
  const auto f = fixtures::sample_field(r, [&](const Point3& p) { return -3.0 * pi * pi * exact(p); });
  SolverOptions opts;
  opts.alpha = 0.0;
  const auto chi = solve_with_rhs(r, laplacian_rhs(r, f.values), nullptr, opts, stats);
  const auto truth = fixtures::sample_field(r, exact);
  double err = 0.0;
  for (std::size_t i = 0; i < chi.values.size(); ++i) err = std::max(err, std::abs(chi.values[i] - truth.values[i]));
  return err;
}

}  // namespace

TEST_CASE("splat: sample on a node stays on that node") {
  SampleSet s;
  s.positions = {{0.25, 0.5, 0.75}};
  s.normals = {{0, 0, 1}};
  const auto v = splat_trilinear(s, 16);
  const auto g = v.grid();
  const auto node = g.index(4, 8, 12);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(v.components[0][i] == 0.0);
    CHECK(v.components[1][i] == 0.0);
    CHECK(v.components[2][i] == (i == node ? 1.0 : 0.0));
  }
}

TEST_CASE("splat: sample at a cell centre spreads 1/8 per corner") {
  SampleSet s;
  s.positions = {{(3 + 0.5) / 8, (2 + 0.5) / 8, (5 + 0.5) / 8}};
  s.normals = {{1, 0, 0}};
  const auto v = splat_trilinear(s, 8);
  const auto g = v.grid();
  int touched = 0;
  for (int c = 0; c < 8; ++c) {
    const auto idx = g.index(3 + (c & 1), 2 + ((c >> 1) & 1), 5 + (c >> 2));
    CHECK(v.components[0][idx] == doctest::Approx(0.125).epsilon(1e-14));
  }
  for (double x : v.components[0]) touched += x != 0.0;
  CHECK(touched == 8);
}

TEST_CASE("splat: vector mass is conserved before and after smoothing") {
  auto s = random_init(build_samples(fixtures::sphere_points(3000, 2, 0.3, kCenter), 5), 3);
  s.normals[0] = Vec3{};  // zero normals are skipped
  Vec3 mass;
  for (const auto& n : s.normals) mass += n;
  const auto raw = splat_trilinear(s, 32);
  const auto smooth = smooth_binomial(raw);
  for (int a = 0; a < 3; ++a) {
    double m0 = 0.0, m1 = 0.0;
    for (double x : raw.components[a]) m0 += x;
    for (double x : smooth.components[a]) m1 += x;
    CHECK(std::abs(m0 - mass[a]) < 1e-9);
    CHECK(std::abs(m1 - mass[a]) < 1e-9);
  }
  const auto serial = splat_normals(s, 32, Exec::serial);
  const auto par = splat_normals(s, 32, Exec::parallel);
  for (int a = 0; a < 3; ++a) CHECK(serial.components[a] == par.components[a]);
}

TEST_CASE("divergence of constant and linear fields") {
  const int r = 8;
  GridVectorField c(r), lin(r);
  const auto g = c.grid();
  for (int k = 0; k <= r; ++k)
    for (int j = 0; j <= r; ++j)
      for (int i = 0; i <= r; ++i) {
        const auto idx = g.index(i, j, k);
        c.components[0][idx] = 2.0, c.components[1][idx] = -1.0, c.components[2][idx] = 0.5;
        lin.components[0][idx] = double(i) / r, lin.components[1][idx] = double(j) / r,
        lin.components[2][idx] = double(k) / r;
      }
  const auto dc = divergence(c), dl = divergence(lin);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(dc[i]) < 1e-12);
    CHECK(std::abs(dl[i] - 3.0) < 1e-9);
  }
}

TEST_CASE("divergence converges at second order on a smooth field") {
  // V = (sin 2x, cos 3y, xz^2): div V = 2 cos 2x - 3 sin 3y + 2xz.
  const auto probe_error = [](int r) {
    GridVectorField v(r);
    const auto g = v.grid();
    for (int k = 0; k <= r; ++k)
      for (int j = 0; j <= r; ++j)
        for (int i = 0; i <= r; ++i) {
          const double x = double(i) / r, y = double(j) / r, z = double(k) / r;
          const auto idx = g.index(i, j, k);
          v.components[0][idx] = std::sin(2 * x);
          v.components[1][idx] = std::cos(3 * y);
          v.components[2][idx] = x * z * z;
        }
    const auto div = divergence(v);
    double err = 0.0;
    for (const Point3 p : {Point3{0.25, 0.5, 0.5}, Point3{0.5, 0.25, 0.75}, Point3{0.75, 0.75, 0.25},
                           Point3{0.5, 0.5, 0.5}, Point3{0.25, 0.75, 0.25}}) {
      const double exact = 2 * std::cos(2 * p.x) - 3 * std::sin(3 * p.y) + 2 * p.x * p.z;
      const auto idx = g.index(int(p.x * r), int(p.y * r), int(p.z * r));
      err = std::max(err, std::abs(div[idx] - exact));
    }
    return err;
  };
  const double e16 = probe_error(16), e32 = probe_error(32);
  CHECK(e16 < 0.05);
  CHECK(e16 / e32 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("eval_trilinear") {
  const int r = 10;
  const auto lin = fixtures::sample_field(r, [](const Point3& p) { return p.x; });
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const Point3 p{u(rng), u(rng), u(rng)};
    CHECK(std::abs(eval_trilinear(lin, p) - p.x) < 1e-12);
  }

  GridField f(r);
  for (auto& v : f.values) v = u(rng);
  CHECK(eval_trilinear(f, {0.3, 0.7, 1.0}) == f.at(3, 7, 10));
  CHECK(eval_trilinear(f, {0.0, 0.0, 0.0}) == f.at(0, 0, 0));
  for (int t = 0; t < 200; ++t) {
    const Point3 p{u(rng), u(rng), u(rng)};
    // Independent oracle: weighted corner sum with explicit floor indices.
    const int i = std::min(int(p.x * r), r - 1), j = std::min(int(p.y * r), r - 1), k = std::min(int(p.z * r), r - 1);
    const double tx = p.x * r - i, ty = p.y * r - j, tz = p.z * r - k;
    double expect = 0.0;
    for (int dz = 0; dz < 2; ++dz)
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx)
          expect += (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty) * (dz ? tz : 1 - tz) * f.at(i + dx, j + dy, k + dz);
    CHECK(std::abs(eval_trilinear(f, p) - expect) < 1e-12);
  }
  CHECK_THROWS_AS(eval_trilinear(f, {1.01, 0.5, 0.5}), GeometryError);
  CHECK_THROWS_AS(eval_trilinear(f, {0.5, -1e-9, 0.5}), GeometryError);
}

TEST_CASE("screened operator is symmetric") {
  const int r = 16;
  const auto s = sphere_samples(2000, 5, 0.3);
  const ScreenedOperator op(r, &s, 10.0);
  const auto x = random_interior_field(r, 1), y = random_interior_field(r, 2);
  std::vector<double> ax(x.size()), ay(y.size());
  op.apply(x, ax);
  op.apply(y, ay);
  const double lhs = dot(ax, y), rhs = dot(x, ay);
  CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(std::abs(lhs), 1.0));
  CHECK(dot(ax, x) > 0.0);
}

TEST_CASE("zero normals without screening give a zero field") {
  SampleSet s = sphere_samples(500, 5, 0.3);
  for (auto& n : s.normals) n = Vec3{};
  SolverOptions opts;
  opts.alpha = 0.0;
  const auto chi = solve_screened(s, 16, opts);
  CHECK(std::all_of(chi.values.begin(), chi.values.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("solver residual decreases monotonically and reaches tolerance") {
  const auto s = sphere_samples(4000, 6, 0.3);
  SolverOptions opts;
  SolveStats stats;
  const auto chi = solve_screened(s, 32, opts, &stats);
  REQUIRE(!stats.residual_history.empty());
  CHECK(stats.relative_residual <= 1e-7);
  for (std::size_t i = 1; i < stats.residual_history.size(); ++i)
    CHECK(stats.residual_history[i] <= stats.residual_history[i - 1] * (1 + 1e-12));

  // Boundary stays pinned at zero.
  const auto g = chi.grid();
  for (int k = 0; k < g.nodes; ++k)
    for (int j = 0; j < g.nodes; ++j)
      for (int i = 0; i < g.nodes; ++i)
        if (g.on_boundary(i, j, k)) CHECK(chi.values[g.index(i, j, k)] == 0.0);
}

TEST_CASE("iteration cap raises SolverError carrying the residual") {
  const auto s = sphere_samples(2000, 6, 0.3);
  SolverOptions opts;
  opts.max_iters = 3;
  try {
    solve_screened(s, 32, opts);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.residual() > 1e-7);
    CHECK(e.iterations() == 3);
  }
}

TEST_CASE("inward normals make the indicator larger inside") {
  // Binned at the grid's own depth, as the pipeline does.
  const auto s = sphere_samples(6000, 5, 0.3);
  const auto chi = solve_screened(s, 32, SolverOptions{});
  const double iso = mean_sample_value(chi, s);
  CHECK(iso > 0.2);
  CHECK(iso < 0.8);
  double inside = 0.0, outside = 0.0;
  int n_in = 0, n_out = 0;
  const auto g = chi.grid();
  for (int k = 0; k < g.nodes; ++k)
    for (int j = 0; j < g.nodes; ++j)
      for (int i = 0; i < g.nodes; ++i) {
        const double d = distance(Point3{i / 32.0, j / 32.0, k / 32.0}, kCenter);
        if (d < 0.25) inside += chi.at(i, j, k), ++n_in;
        if (d > 0.35) outside += chi.at(i, j, k), ++n_out;
      }
  CHECK(inside / n_in > outside / n_out + 0.3);
}

TEST_CASE("solution does not depend on sample order") {
  const auto s = sphere_samples(3000, 5, 0.3);
  SampleSet p = s;
  std::mt19937_64 rng(8);
  std::vector<std::size_t> perm(s.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    p.positions[i] = s.positions[perm[i]];
    p.normals[i] = s.normals[perm[i]];
  }
  const auto a = solve_screened(s, 32, SolverOptions{});
  const auto b = solve_screened(p, 32, SolverOptions{});
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    scale = std::max(scale, std::abs(a.values[i]));
    diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
  }
  CHECK(diff <= 1e-5 * scale);
}

TEST_CASE("serial and parallel solves agree") {
  const auto s = sphere_samples(3000, 5, 0.3);
  SolverOptions opts;
  opts.exec = Exec::serial;
  const auto a = solve_screened(s, 16, opts);
  opts.exec = Exec::parallel;
  const auto b = solve_screened(s, 16, opts);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-6);
}

TEST_CASE("unscreened sphere solve extracts a sphere") {
  const int r = 64;
  const double radius = 0.3;
  const auto s = sphere_samples(40000, 7, radius);
  SolverOptions opts;
  opts.alpha = 0.0;
  const auto chi = solve_screened(s, r, opts);
  const auto mesh = marching_cubes(chi, mean_sample_value(chi, s));
  REQUIRE(!mesh.empty());
  double dev = 0.0;
  for (const auto& v : mesh.vertices()) dev += std::abs(distance(v, kCenter) - radius);
  CHECK(dev / double(mesh.vertex_count()) < 2.0 / r);
}

TEST_CASE("manufactured solution converges at second order") {
  SolveStats s32, s64;
  const double e32 = manufactured_error(32, &s32);
  const double e64 = manufactured_error(64, &s64);
  CHECK(s32.relative_residual <= 1e-7);
  CHECK(s64.relative_residual <= 1e-7);
  const double ratio = e32 / e64;
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
}
