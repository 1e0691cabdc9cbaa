#include <doctest.h>

#include <random>

#include "ipsr/kernels.hpp"
#include "ipsr/parallel.hpp"

using namespace ipsr;
using namespace ipsr::kernels;

namespace {

std::vector<double> random_interior(const Grid3& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(g.size(), 0.0);
  for (int k = 1; k < g.nodes - 1; ++k)
    for (int j = 1; j < g.nodes - 1; ++j)
      for (int i = 1; i < g.nodes - 1; ++i) v[g.index(i, j, k)] = u(rng);
  return v;
}

NodeStencil random_stencil(const Grid3& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NodeStencil s;
  for (int k = 2; k < g.nodes - 2; k += 3)
    for (int j = 2; j < g.nodes - 2; j += 2)
      for (int i = 1; i < g.nodes - 1; ++i) {
        s.nodes.push_back(static_cast<std::uint32_t>(g.index(i, j, k)));
        std::array<double, 27> c{};
        for (auto& x : c) x = u(rng);
        s.coeffs.push_back(c);
      }
  return s;
}

}  // namespace

TEST_CASE("laplacian: serial and OpenMP agree bitwise") {
  const Grid3 g{33};
  const auto x = random_interior(g, 1);
  std::vector<double> a(g.size(), 7.0), b(g.size(), -7.0);
  serial::apply_laplacian(g, 0.5, x, a);
  omp::apply_laplacian(g, 0.5, x, b);
  CHECK(a == b);
}

TEST_CASE("laplacian of a constant interior block") {
  // 6x - sum(neighbours) vanishes where all neighbours share the value.
  const Grid3 g{9};
  std::vector<double> x(g.size(), 0.0), y(g.size());
  for (int k = 1; k < 8; ++k)
    for (int j = 1; j < 8; ++j)
      for (int i = 1; i < 8; ++i) x[g.index(i, j, k)] = 1.0;
  apply_laplacian(Exec::serial, g, 1.0, x, y);
  CHECK(y[g.index(4, 4, 4)] == 0.0);
  CHECK(y[g.index(1, 4, 4)] == 1.0);  // one neighbour is the zero boundary
  CHECK(y[g.index(1, 1, 1)] == 3.0);
  CHECK(y[g.index(0, 4, 4)] == 0.0);
}

TEST_CASE("stencil: serial and OpenMP agree bitwise") {
  const Grid3 g{21};
  const auto x = random_interior(g, 2);
  const auto s = random_stencil(g, 3);
  std::vector<double> a = random_interior(g, 4), b = a;
  serial::apply_stencil(g, s, x, a);
  omp::apply_stencil(g, s, x, b);
  CHECK(a == b);
}

TEST_CASE("smoothing: serial and OpenMP agree, mass preserved") {
  const Grid3 g{17};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> in(g.size());
  for (auto& v : in) v = u(rng);
  double mass = 0.0;
  for (double v : in) mass += v;
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<double> a(g.size()), b(g.size());
    serial::smooth_axis(g, axis, in, a);
    omp::smooth_axis(g, axis, in, b);
    CHECK(a == b);
    double out_mass = 0.0;
    for (double v : a) out_mass += v;
    CHECK(out_mass == doctest::Approx(mass).epsilon(1e-12));
  }
}

TEST_CASE("dot, axpy, xpby") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(100003), y(100003);
  for (auto& v : x) v = u(rng);
  for (auto& v : y) v = u(rng);

  const double ds = serial::dot(x, y), dp = omp::dot(x, y);
  CHECK(dp == doctest::Approx(ds).epsilon(1e-12));

  auto a = y, b = y;
  serial::axpy(0.3, x, a);
  omp::axpy(0.3, x, b);
  CHECK(a == b);
  CHECK(a[17] == y[17] + 0.3 * x[17]);

  a = y, b = y;
  serial::xpby(x, -1.5, a);
  omp::xpby(x, -1.5, b);
  CHECK(a == b);
  CHECK(a[99] == x[99] + -1.5 * y[99]);
}

TEST_CASE("OpenMP dot does not depend on the thread count") {
  std::vector<double> x(300001);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : x) v = u(rng);
  double one = 0.0;
  {
    parallel::ThreadLimit limit(1);
    one = omp::dot(x, x);
  }
  parallel::ThreadLimit limit(4);
  CHECK(omp::dot(x, x) == one);
}
