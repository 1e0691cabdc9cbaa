#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ipsr/geometry.hpp"
#include "ipsr/kernels.hpp"
#include "ipsr/sampling.hpp"

namespace ipsr {

/// Scalar field on the (R+1)^3 nodes of a regular grid over [0,1]^3.
struct GridField {
  int resolution = 0;  // R cells per axis
  std::vector<double> values;

  GridField() = default;
  explicit GridField(int r)
      : resolution(r), values(kernels::Grid3{r + 1}.size(), 0.0) {}

  kernels::Grid3 grid() const { return {resolution + 1}; }
  double spacing() const { return 1.0 / resolution; }
  double& at(int i, int j, int k) { return values[grid().index(i, j, k)]; }
  double at(int i, int j, int k) const { return values[grid().index(i, j, k)]; }
};

struct GridVectorField {
  int resolution = 0;
  std::array<std::vector<double>, 3> components;

  GridVectorField() = default;
  explicit GridVectorField(int r) : resolution(r) {
    for (auto& c : components) c.assign(kernels::Grid3{r + 1}.size(), 0.0);
  }
  kernels::Grid3 grid() const { return {resolution + 1}; }
};

/// Trilinear corner weights of a point inside the grid.
struct CellWeights {
  std::array<std::size_t, 8> nodes;
  std::array<double, 8> weights;
};
CellWeights cell_weights(int resolution, const Point3& p);

/// Scatters every non-zero sample normal onto its 8 cell corners with trilinear weights.
GridVectorField splat_trilinear(const SampleSet& samples, int resolution);

/// One separable 1-2-1 binomial pass per component (mass preserving).
GridVectorField smooth_binomial(const GridVectorField& field,
                                kernels::Exec exec = kernels::Exec::parallel);

/// splat_trilinear followed by smooth_binomial.
GridVectorField splat_normals(const SampleSet& samples, int resolution,
                              kernels::Exec exec = kernels::Exec::parallel);

/// Central-difference divergence (one-sided on the boundary faces), spacing 1/R.
std::vector<double> divergence(const GridVectorField& field);

struct SolverOptions {
  double alpha = 10.0;
  double tol = 1e-7;
  int max_iters = 0;  // 0 selects 10 * R
  kernels::Exec exec = kernels::Exec::parallel;
  /// Warm start; must have the grid's node count and vanish on the boundary.
  const std::vector<double>* initial_guess = nullptr;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> residual_history;  // relative residual after each iteration
};

/// The screened system matrix
///   A = h * L + (alpha / n) * P^T P
/// acting on interior nodes, with L the 7-point graph Laplacian (Dirichlet
/// nodes eliminated) and P the trilinear evaluation at the samples.
class ScreenedOperator {
 public:
  ScreenedOperator(int resolution, const SampleSet* samples, double alpha,
                   kernels::Exec exec = kernels::Exec::parallel);

  void apply(std::span<const double> x, std::span<double> y) const;

  /// (alpha / n) * P^T (1/2 * 1): the screening part of the right-hand side.
  void add_screening_rhs(std::span<double> rhs) const;

  const kernels::Grid3& grid() const { return grid_; }
  int resolution() const { return resolution_; }

 private:
  int resolution_;
  kernels::Grid3 grid_;
  double h_;
  kernels::Exec exec_;
  kernels::NodeStencil screening_;
  std::vector<std::pair<std::size_t, double>> screening_rhs_;
};

/// Gradient-fit right-hand side G^T V for a splatted normal field.
std::vector<double> gradient_rhs(const GridVectorField& splatted);

/// Right-hand side that makes the unscreened solve approximate Δχ = f.
std::vector<double> laplacian_rhs(int resolution, std::span<const double> f);

/// Minimizes sum_nodes |∇χ - V|^2 h^3 + (alpha/n) sum_i (χ(s_i) - 1/2)^2 with χ = 0 on
/// the domain boundary, by conjugate residuals. Throws SolverError when the
/// iteration cap is reached before `tol`.
GridField solve_screened(const SampleSet& samples, int resolution, const SolverOptions& opts,
                         SolveStats* stats = nullptr);

/// Same solver with an explicit right-hand side replacing G^T V. Screening is
/// applied when `screening_samples` is given and alpha > 0.
GridField solve_with_rhs(int resolution, std::span<const double> rhs,
                         const SampleSet* screening_samples, const SolverOptions& opts,
                         SolveStats* stats = nullptr);

/// Trilinear interpolation; throws GeometryError outside [0,1]^3.
double eval_trilinear(const GridField& field, const Point3& p);

}  // namespace ipsr
