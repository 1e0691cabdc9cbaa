#include "ipsr/kernels.hpp"

namespace ipsr::kernels {

namespace serial {

void apply_laplacian(const Grid3& g, double scale, std::span<const double> x,
                     std::span<double> y) {
  const int n = g.nodes;
  const std::size_t sy = static_cast<std::size_t>(n), sz = sy * sy;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t p = g.index(i, j, k);
        if (g.on_boundary(i, j, k)) {
          y[p] = 0.0;
          continue;
        }
        y[p] = scale * (6.0 * x[p] - x[p - 1] - x[p + 1] - x[p - sy] - x[p + sy] - x[p - sz] -
                        x[p + sz]);
      }
}

void apply_stencil(const Grid3& g, const NodeStencil& s, std::span<const double> x,
                   std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(g.nodes);
  for (std::size_t t = 0; t < s.nodes.size(); ++t) {
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
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + b * y[i];
}

}  // namespace serial

void apply_laplacian(Exec exec, const Grid3& g, double scale, std::span<const double> x,
                     std::span<double> y) {
  exec == Exec::serial ? serial::apply_laplacian(g, scale, x, y)
                       : omp::apply_laplacian(g, scale, x, y);
}

void apply_stencil(Exec exec, const Grid3& g, const NodeStencil& s, std::span<const double> x,
                   std::span<double> y) {
  exec == Exec::serial ? serial::apply_stencil(g, s, x, y) : omp::apply_stencil(g, s, x, y);
}

void smooth_axis(Exec exec, const Grid3& g, int axis, std::span<const double> in,
                 std::span<double> out) {
  exec == Exec::serial ? serial::smooth_axis(g, axis, in, out)
                       : omp::smooth_axis(g, axis, in, out);
}

double dot(Exec exec, std::span<const double> a, std::span<const double> b) {
  return exec == Exec::serial ? serial::dot(a, b) : omp::dot(a, b);
}

void axpy(Exec exec, double a, std::span<const double> x, std::span<double> y) {
  exec == Exec::serial ? serial::axpy(a, x, y) : omp::axpy(a, x, y);
}

void xpby(Exec exec, std::span<const double> x, double b, std::span<double> y) {
  exec == Exec::serial ? serial::xpby(x, b, y) : omp::xpby(x, b, y);
}

}  // namespace ipsr::kernels
