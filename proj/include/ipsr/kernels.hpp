#pragma once

// Data-parallel grid kernels used by the Poisson solver.
//
// Each kernel has a serial reference (kernels_serial.cpp) and an OpenMP
// variant (kernels_omp.cpp). Per-node kernels produce bit-identical results in
// both modes. Reductions in the OpenMP variant sum fixed-size blocks and then
// add the block sums in order, so the result does not depend on the thread
// count; the serial reference is a plain left-to-right sum.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ipsr::kernels {

enum class Exec { serial, parallel };

/// Node lattice of a cubic grid with `nodes` points per axis (R + 1).
struct Grid3 {
  int nodes = 0;

  std::size_t size() const {
    const auto n = static_cast<std::size_t>(nodes);
    return n * n * n;
  }
  std::size_t index(int i, int j, int k) const {
    const auto n = static_cast<std::size_t>(nodes);
    return static_cast<std::size_t>(i) + n * (static_cast<std::size_t>(j) + n * static_cast<std::size_t>(k));
  }
  bool on_boundary(int i, int j, int k) const {
    return i == 0 || j == 0 || k == 0 || i == nodes - 1 || j == nodes - 1 || k == nodes - 1;
  }
};

/// Sparse 27-point operator stored only at the nodes it touches.
struct NodeStencil {
  std::vector<std::uint32_t> nodes;             // ascending node indices
  std::vector<std::array<double, 27>> coeffs;   // offset o = (di+1) + 3(dj+1) + 9(dk+1)
};

/// y = scale * (6 x_p - sum of 6 neighbours) at interior nodes; y = 0 on the boundary.
/// Expects x to vanish on the boundary.
void apply_laplacian(Exec exec, const Grid3& g, double scale, std::span<const double> x,
                     std::span<double> y);

/// y += S x for the stencil's rows.
void apply_stencil(Exec exec, const Grid3& g, const NodeStencil& s, std::span<const double> x,
                   std::span<double> y);

/// One 1-2-1 pass along `axis`. The end nodes fold their outgoing quarter back
/// onto themselves, which keeps the total sum unchanged.
void smooth_axis(Exec exec, const Grid3& g, int axis, std::span<const double> in,
                 std::span<double> out);

double dot(Exec exec, std::span<const double> a, std::span<const double> b);

/// y += a * x
void axpy(Exec exec, double a, std::span<const double> x, std::span<double> y);

/// y = x + b * y
void xpby(Exec exec, std::span<const double> x, double b, std::span<double> y);

namespace serial {
void apply_laplacian(const Grid3&, double, std::span<const double>, std::span<double>);
void apply_stencil(const Grid3&, const NodeStencil&, std::span<const double>, std::span<double>);
void smooth_axis(const Grid3&, int, std::span<const double>, std::span<double>);
double dot(std::span<const double>, std::span<const double>);
void axpy(double, std::span<const double>, std::span<double>);
void xpby(std::span<const double>, double, std::span<double>);
}  // namespace serial

namespace omp {
void apply_laplacian(const Grid3&, double, std::span<const double>, std::span<double>);
void apply_stencil(const Grid3&, const NodeStencil&, std::span<const double>, std::span<double>);
void smooth_axis(const Grid3&, int, std::span<const double>, std::span<double>);
double dot(std::span<const double>, std::span<const double>);
void axpy(double, std::span<const double>, std::span<double>);
void xpby(std::span<const double>, double, std::span<double>);
}  // namespace omp

inline constexpr int stencil_offset(int di, int dj, int dk) {
  return (di + 1) + 3 * (dj + 1) + 9 * (dk + 1);
}

}  // namespace ipsr::kernels
