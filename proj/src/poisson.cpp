#include "ipsr/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "ipsr/error.hpp"

namespace ipsr {

using kernels::Exec;
using kernels::Grid3;

CellWeights cell_weights(int resolution, const Point3& p) {
  const Grid3 g{resolution + 1};
  int c[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    const double s = p[a] * resolution;
    c[a] = std::clamp(static_cast<int>(std::floor(s)), 0, resolution - 1);
    t[a] = s - c[a];
  }
  CellWeights w;
  for (int corner = 0; corner < 8; ++corner) {
    const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
    w.nodes[corner] = g.index(c[0] + dx, c[1] + dy, c[2] + dz);
    w.weights[corner] = (dx ? t[0] : 1.0 - t[0]) * (dy ? t[1] : 1.0 - t[1]) *
                        (dz ? t[2] : 1.0 - t[2]);
  }
  return w;
}

GridVectorField splat_trilinear(const SampleSet& samples, int resolution) {
  GridVectorField v(resolution);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec3& n = samples.normals[i];
    if (n == Vec3{}) continue;
    const auto w = cell_weights(resolution, samples.positions[i]);
    for (int c = 0; c < 8; ++c)
      for (int a = 0; a < 3; ++a) v.components[a][w.nodes[c]] += w.weights[c] * n[a];
  }
  return v;
}

GridVectorField smooth_binomial(const GridVectorField& field, Exec exec) {
  GridVectorField out = field;
  const Grid3 g = field.grid();
  std::vector<double> tmp(g.size());
  for (auto& comp : out.components) {
    for (int axis = 0; axis < 3; ++axis) {
      kernels::smooth_axis(exec, g, axis, comp, tmp);
      comp.swap(tmp);
    }
  }
  return out;
}

GridVectorField splat_normals(const SampleSet& samples, int resolution, Exec exec) {
  return smooth_binomial(splat_trilinear(samples, resolution), exec);
}

std::vector<double> divergence(const GridVectorField& field) {
  const Grid3 g = field.grid();
  const int n = g.nodes;
  const double inv_h = static_cast<double>(field.resolution);
  std::vector<double> div(g.size(), 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int idx[3] = {i, j, k};
        double d = 0.0;
        for (int a = 0; a < 3; ++a) {
          const auto& comp = field.components[a];
          int lo[3] = {i, j, k}, hi[3] = {i, j, k};
          double span = 2.0;
          if (idx[a] == 0) {
            hi[a] += 1;
            span = 1.0;
          } else if (idx[a] == n - 1) {
            lo[a] -= 1;
            span = 1.0;
          } else {
            lo[a] -= 1;
            hi[a] += 1;
          }
          d += (comp[g.index(hi[0], hi[1], hi[2])] - comp[g.index(lo[0], lo[1], lo[2])]) *
               inv_h / span;
        }
        div[g.index(i, j, k)] = d;
      }
  return div;
}

ScreenedOperator::ScreenedOperator(int resolution, const SampleSet* samples, double alpha,
                                   Exec exec)
    : resolution_(resolution), grid_{resolution + 1}, h_(1.0 / resolution), exec_(exec) {
  if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
  if (!samples || alpha == 0.0 || samples->size() == 0) return;

  const double weight = alpha / static_cast<double>(samples->size());
  std::unordered_map<std::size_t, std::size_t> slot;
  std::vector<std::uint32_t> rows;
  std::vector<std::array<double, 27>> coeffs;
  std::unordered_map<std::size_t, double> rhs;
  const auto n = static_cast<std::ptrdiff_t>(grid_.nodes);

  for (const auto& p : samples->positions) {
    const auto w = cell_weights(resolution, p);
    for (int a = 0; a < 8; ++a) {
      if (w.weights[a] == 0.0) continue;
      const std::size_t row = w.nodes[a];
      const int ai = static_cast<int>(row % n), aj = static_cast<int>((row / n) % n),
                ak = static_cast<int>(row / (n * n));
      if (grid_.on_boundary(ai, aj, ak)) continue;
      rhs[row] += weight * 0.5 * w.weights[a];
      auto [it, inserted] = slot.emplace(row, rows.size());
      if (inserted) {
        rows.push_back(static_cast<std::uint32_t>(row));
        coeffs.push_back({});
      }
      auto& c = coeffs[it->second];
      for (int b = 0; b < 8; ++b) {
        if (w.weights[b] == 0.0) continue;
        const int di = (b & 1) - (a & 1), dj = ((b >> 1) & 1) - ((a >> 1) & 1),
                  dk = ((b >> 2) & 1) - ((a >> 2) & 1);
        c[kernels::stencil_offset(di, dj, dk)] += weight * w.weights[a] * w.weights[b];
      }
    }
  }

  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rows[a] < rows[b]; });
  screening_.nodes.reserve(rows.size());
  screening_.coeffs.reserve(rows.size());
  for (auto i : order) {
    screening_.nodes.push_back(rows[i]);
    screening_.coeffs.push_back(coeffs[i]);
  }
  screening_rhs_.assign(rhs.begin(), rhs.end());
  std::sort(screening_rhs_.begin(), screening_rhs_.end());
}

void ScreenedOperator::apply(std::span<const double> x, std::span<double> y) const {
  kernels::apply_laplacian(exec_, grid_, h_, x, y);
  if (!screening_.nodes.empty()) kernels::apply_stencil(exec_, grid_, screening_, x, y);
}

void ScreenedOperator::add_screening_rhs(std::span<double> rhs) const {
  for (const auto& [node, value] : screening_rhs_) rhs[node] += value;
}

std::vector<double> gradient_rhs(const GridVectorField& splatted) {
  // Each sample stands for a surface patch of area h^2 and the smoothing
  // kernel integrates to one over a cell volume h^3, so the continuous field is
  // V = splat / h. With edge-midpoint gradients, G^T V at node p reduces to
  // h^2 * (1/2) * sum_a (V_a[p - e_a] - V_a[p + e_a]).
  const Grid3 g = splatted.grid();
  const int n = g.nodes;
  const double h = 1.0 / splatted.resolution;
  const std::size_t stride[3] = {1, static_cast<std::size_t>(n),
                                 static_cast<std::size_t>(n) * static_cast<std::size_t>(n)};
  std::vector<double> b(g.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        const std::size_t p = g.index(i, j, k);
        double acc = 0.0;
        for (int a = 0; a < 3; ++a)
          acc += splatted.components[a][p - stride[a]] - splatted.components[a][p + stride[a]];
        b[p] = 0.5 * h * acc;
      }
  return b;
}

std::vector<double> laplacian_rhs(int resolution, std::span<const double> f) {
  // h * L approximates -h^3 Δ.
  const Grid3 g{resolution + 1};
  const double h = 1.0 / resolution;
  std::vector<double> b(g.size(), 0.0);
  for (int k = 1; k < g.nodes - 1; ++k)
    for (int j = 1; j < g.nodes - 1; ++j)
      for (int i = 1; i < g.nodes - 1; ++i) {
        const auto p = g.index(i, j, k);
        b[p] = -h * h * h * f[p];
      }
  return b;
}

namespace {

GridField conjugate_residual(const ScreenedOperator& op, std::vector<double> b,
                             const SolverOptions& opts, SolveStats* stats) {
  const Exec exec = opts.exec;
  const Grid3 g = op.grid();
  GridField chi(op.resolution());
  const int max_iters = opts.max_iters > 0 ? opts.max_iters : 10 * op.resolution();
  if (!(opts.tol > 0.0)) throw ConfigError("solver tolerance must be > 0");

  // Boundary rows carry no unknowns.
  for (int k = 0; k < g.nodes; ++k)
    for (int j = 0; j < g.nodes; ++j)
      for (int i = 0; i < g.nodes; ++i)
        if (g.on_boundary(i, j, k)) b[g.index(i, j, k)] = 0.0;

  const double b_norm = std::sqrt(kernels::dot(exec, b, b));
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  st = SolveStats{};
  if (b_norm == 0.0) return chi;

  std::vector<double>& x = chi.values;
  std::vector<double> r = b;
  if (opts.initial_guess) {
    if (opts.initial_guess->size() != g.size()) throw ConfigError("initial guess size mismatch");
    x = *opts.initial_guess;
    std::vector<double> ax(g.size());
    op.apply(x, ax);
    kernels::axpy(exec, -1.0, ax, r);
  }

  double rel = std::sqrt(kernels::dot(exec, r, r)) / b_norm;
  st.relative_residual = rel;
  if (rel <= opts.tol) return chi;

  std::vector<double> p = r, ar(g.size()), ap(g.size());
  op.apply(r, ar);
  ap = ar;
  double r_ar = kernels::dot(exec, r, ar);

  for (int it = 1; it <= max_iters; ++it) {
    const double ap_ap = kernels::dot(exec, ap, ap);
    if (!(ap_ap > 0.0)) break;
    const double step = r_ar / ap_ap;
    kernels::axpy(exec, step, p, x);
    kernels::axpy(exec, -step, ap, r);
    rel = std::sqrt(kernels::dot(exec, r, r)) / b_norm;
    st.iterations = it;
    st.relative_residual = rel;
    st.residual_history.push_back(rel);
    if (rel <= opts.tol) return chi;

    op.apply(r, ar);
    const double r_ar_next = kernels::dot(exec, r, ar);
    const double beta = r_ar_next / r_ar;
    r_ar = r_ar_next;
    kernels::xpby(exec, r, beta, p);
    kernels::xpby(exec, ar, beta, ap);
  }
  std::ostringstream msg;
  msg << "linear solve did not reach relative residual " << opts.tol << " within "
      << max_iters << " iterations (achieved " << rel << ")";
  throw SolverError(msg.str(), rel, st.iterations);
}

}  // namespace

GridField solve_with_rhs(int resolution, std::span<const double> rhs,
                         const SampleSet* screening_samples, const SolverOptions& opts,
                         SolveStats* stats) {
  const ScreenedOperator op(resolution, screening_samples, opts.alpha, opts.exec);
  if (rhs.size() != op.grid().size()) throw ConfigError("right-hand side size mismatch");
  std::vector<double> b(rhs.begin(), rhs.end());
  op.add_screening_rhs(b);
  return conjugate_residual(op, std::move(b), opts, stats);
}

GridField solve_screened(const SampleSet& samples, int resolution, const SolverOptions& opts,
                         SolveStats* stats) {
  const auto splatted = splat_normals(samples, resolution, opts.exec);
  const auto b = gradient_rhs(splatted);
  return solve_with_rhs(resolution, b, &samples, opts, stats);
}

double eval_trilinear(const GridField& field, const Point3& p) {
  for (int a = 0; a < 3; ++a)
    if (!(p[a] >= 0.0 && p[a] <= 1.0)) throw GeometryError("evaluation point outside [0,1]^3");
  const auto w = cell_weights(field.resolution, p);
  double v = 0.0;
  for (int c = 0; c < 8; ++c) v += w.weights[c] * field.values[w.nodes[c]];
  return v;
}

}  // namespace ipsr
