#include <omp.h>

#include "ipsr/kernels.hpp"

namespace ipsr::kernels::omp {

namespace {
constexpr std::size_t kBlock = 4096;
}

void apply_laplacian(const Grid3& g, double scale, std::span<const double> x,
                     std::span<double> y) {
  const int n = g.nodes;
  const std::size_t sy = static_cast<std::size_t>(n), sz = sy * sy;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const std::size_t row = g.index(0, j, k);
      if (k == 0 || j == 0 || k == n - 1 || j == n - 1) {
        for (int i = 0; i < n; ++i) y[row + i] = 0.0;
        continue;
      }
      y[row] = 0.0;
      y[row + n - 1] = 0.0;
#pragma omp simd
      for (int i = 1; i < n - 1; ++i) {
        const std::size_t p = row + i;
        y[p] = scale * (6.0 * x[p] - x[p - 1] - x[p + 1] - x[p - sy] - x[p + sy] - x[p - sz] -
                        x[p + sz]);
      }
    }
  }
}

void apply_stencil(const Grid3& g, const NodeStencil& s, std::span<const double> x,
                   std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(g.nodes);
  const auto count = static_cast<std::ptrdiff_t>(s.nodes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    const auto p = static_cast<std::ptrdiff_t>(s.nodes[t]);
    const auto& c = s.coeffs[t];
    double acc = 0.0;
    int o = 0;
    for (int dk = -1; dk <= 1; ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di, ++o)
          if (c[o] != 0.0) acc += c[o] * x[static_cast<std::size_t>(p + di + n * (dj + n * dk))];
    y[static_cast<std::size_t>(p)] += acc;
  }
}

void smooth_axis(const Grid3& g, int axis, std::span<const double> in, std::span<double> out) {
  const int n = g.nodes;
  const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? static_cast<std::size_t>(n)
                                                        : static_cast<std::size_t>(n) * n);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int c = axis == 0 ? i : (axis == 1 ? j : k);
        const std::size_t p = g.index(i, j, k);
        const double self = in[p];
        const double lo = c > 0 ? in[p - stride] : self;
        const double hi = c < n - 1 ? in[p + stride] : self;
        out[p] = 0.25 * lo + 0.5 * self + 0.25 * hi;
      }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t blocks = (a.size() + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(blocks); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(a.size(), lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[static_cast<std::size_t>(blk)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

}  // namespace ipsr::kernels::omp
