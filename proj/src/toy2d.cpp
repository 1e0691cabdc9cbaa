#include "ipsr/toy2d.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "ipsr/error.hpp"
#include "ipsr/io.hpp"
#include "ipsr/orient.hpp"

namespace ipsr::toy2d {

Vec2 Curve::inward_normal(std::size_t s) const {
  const Vec2 d = vertices[segments[s][1]] - vertices[segments[s][0]];
  const double len = norm(d);
  return len > 0.0 ? Vec2{-d.y / len, d.x / len} : Vec2{};
}

Transform2 fit_unit_square(std::span<const Vec2> points, double padding) {
  if (points.empty()) throw GeometryError("empty point cloud");
  Vec2 lo = points[0], hi = lo;
  for (const auto& p : points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double longest = std::max(hi.x - lo.x, hi.y - lo.y);
  if (!(longest > 0.0)) throw GeometryError("degenerate extent");
  Transform2 t;
  t.scale = (1.0 - 2.0 * padding) / longest;
  t.offset = Vec2{0.5, 0.5} - (lo + hi) * (0.5 * t.scale);
  return t;
}

Samples build_samples(std::span<const Vec2> points, int depth) {
  if (depth < 2 || depth > 12) throw ConfigError("2D depth must be in [2, 12]");
  const long res = 1L << depth;
  std::map<long, std::pair<Vec2, int>> cells;
  for (const auto& p : points) {
    const long cx = std::clamp(static_cast<long>(p.x * res), 0L, res - 1);
    const long cy = std::clamp(static_cast<long>(p.y * res), 0L, res - 1);
    auto& c = cells[cy * res + cx];
    c.first = c.first + p;
    ++c.second;
  }
  Samples s;
  for (const auto& [key, acc] : cells) s.positions.push_back(acc.first * (1.0 / acc.second));
  s.normals.assign(s.positions.size(), Vec2{});
  return s;
}

Samples random_init(Samples s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& n : s.normals) {
    Vec2 g;
    do g = {gauss(rng), gauss(rng)};
    while (norm(g) < 1e-12);
    n = g * (1.0 / norm(g));
  }
  return s;
}

namespace {

struct Corners {
  std::array<std::size_t, 4> nodes;  // (0,0), (1,0), (0,1), (1,1)
  std::array<double, 4> weights;
};

Corners bilinear(int r, Vec2 p) {
  const std::size_t n = static_cast<std::size_t>(r) + 1;
  const double sx = p.x * r, sy = p.y * r;
  const int cx = std::clamp(static_cast<int>(std::floor(sx)), 0, r - 1);
  const int cy = std::clamp(static_cast<int>(std::floor(sy)), 0, r - 1);
  const double tx = sx - cx, ty = sy - cy;
  const std::size_t base = static_cast<std::size_t>(cy) * n + static_cast<std::size_t>(cx);
  return {{base, base + 1, base + n, base + n + 1},
          {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty}};
}

}  // namespace

Field solve(const Samples& s, int r, double alpha, double tol) {
  const std::size_t n = static_cast<std::size_t>(r) + 1;
  const std::size_t total = n * n;
  const double h = 1.0 / r;
  const auto interior = [&](std::size_t p) {
    const std::size_t i = p % n, j = p / n;
    return i > 0 && j > 0 && i < n - 1 && j < n - 1;
  };

  // Splat and one 1-2-1 pass per axis (end nodes fold their quarter back).
  std::array<std::vector<double>, 2> v{std::vector<double>(total, 0.0), std::vector<double>(total, 0.0)};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.normals[i] == Vec2{}) continue;
    const auto c = bilinear(r, s.positions[i]);
    for (int q = 0; q < 4; ++q) {
      v[0][c.nodes[q]] += c.weights[q] * s.normals[i].x;
      v[1][c.nodes[q]] += c.weights[q] * s.normals[i].y;
    }
  }
  std::vector<double> tmp(total);
  for (auto& comp : v)
    for (int axis = 0; axis < 2; ++axis) {
      const std::size_t stride = axis == 0 ? 1 : n;
      for (std::size_t p = 0; p < total; ++p) {
        const std::size_t c = axis == 0 ? p % n : p / n;
        const double lo = c > 0 ? comp[p - stride] : comp[p];
        const double hi = c < n - 1 ? comp[p + stride] : comp[p];
        tmp[p] = 0.25 * lo + 0.5 * comp[p] + 0.25 * hi;
      }
      comp.swap(tmp);
    }

  // Energy sum_edges h^2 (Δχ/h - V)^2 with V = splat / h (sample length h over
  // cell area h^2) gives A = L and b = (1/2) sum_a (S_a[p - e_a] - S_a[p + e_a]).
  std::vector<double> b(total, 0.0);
  for (std::size_t p = 0; p < total; ++p)
    if (interior(p)) b[p] = 0.5 * (v[0][p - 1] - v[0][p + 1] + v[1][p - n] - v[1][p + n]);
  (void)h;

  // Screening (alpha / n) P^T P as per-row sparse entries.
  std::map<std::size_t, std::map<std::size_t, double>> screen;
  if (alpha > 0.0 && s.size() > 0) {
    const double w = alpha / static_cast<double>(s.size());
    for (const auto& pos : s.positions) {
      const auto c = bilinear(r, pos);
      for (int a = 0; a < 4; ++a) {
        if (!interior(c.nodes[a])) continue;
        b[c.nodes[a]] += w * 0.5 * c.weights[a];
        for (int q = 0; q < 4; ++q)
          if (interior(c.nodes[q])) screen[c.nodes[a]][c.nodes[q]] += w * c.weights[a] * c.weights[q];
      }
    }
  }
  std::vector<std::size_t> rows;
  std::vector<std::vector<std::pair<std::size_t, double>>> entries;
  for (const auto& [row, cols] : screen) {
    rows.push_back(row);
    entries.emplace_back(cols.begin(), cols.end());
  }

  const auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t p = 0; p < total; ++p)
      y[p] = interior(p) ? 4.0 * x[p] - x[p - 1] - x[p + 1] - x[p - n] - x[p + n] : 0.0;
    for (std::size_t t = 0; t < rows.size(); ++t)
      for (const auto& [col, c] : entries[t]) y[rows[t]] += c * x[col];
  };
  const auto dotp = [](const std::vector<double>& a, const std::vector<double>& bb) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * bb[i];
    return acc;
  };

  Field f{r, std::vector<double>(total, 0.0)};
  const double b_norm = std::sqrt(dotp(b, b));
  if (b_norm == 0.0) return f;
  std::vector<double>& x = f.values;
  std::vector<double> res = b, p = b, ar(total), ap(total);
  apply(res, ar);
  ap = ar;
  double r_ar = dotp(res, ar);
  const int max_iters = 20 * r;
  for (int it = 0; it < max_iters; ++it) {
    const double step = r_ar / dotp(ap, ap);
    for (std::size_t i = 0; i < total; ++i) {
      x[i] += step * p[i];
      res[i] -= step * ap[i];
    }
    if (std::sqrt(dotp(res, res)) / b_norm <= tol) return f;
    apply(res, ar);
    const double next = dotp(res, ar);
    const double beta = next / r_ar;
    r_ar = next;
    for (std::size_t i = 0; i < total; ++i) {
      p[i] = res[i] + beta * p[i];
      ap[i] = ar[i] + beta * ap[i];
    }
  }
  throw SolverError("2D solve did not converge", std::sqrt(dotp(res, res)) / b_norm, max_iters);
}

double eval_bilinear(const Field& f, Vec2 p) {
  if (!(p.x >= 0 && p.x <= 1 && p.y >= 0 && p.y <= 1)) throw GeometryError("point outside [0,1]^2");
  const auto c = bilinear(f.resolution, p);
  double v = 0.0;
  for (int q = 0; q < 4; ++q) v += c.weights[q] * f.values[c.nodes[q]];
  return v;
}

double mean_sample_value(const Field& f, const Samples& s) {
  if (s.size() == 0) return 0.0;
  double sum = 0.0;
  for (const auto& p : s.positions) sum += eval_bilinear(f, p);
  return sum / static_cast<double>(s.size());
}

Curve marching_squares(const Field& f, double iso) {
  Curve out;
  const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  if (f.values.empty() || !(iso >= *lo && iso < *hi)) return out;

  const int r = f.resolution;
  const std::size_t n = static_cast<std::size_t>(r) + 1;
  const double h = 1.0 / r;
  // Cell corners in cyclic order; edge e joins corner e and corner e + 1.
  constexpr int ci[4] = {0, 1, 1, 0}, cj[4] = {0, 0, 1, 1};
  std::map<std::uint64_t, std::uint32_t> vertex_of;  // grid edge id -> vertex
  const auto grid_edge = [&](int i, int j, int e) -> std::uint64_t {
    const int a = e, b = (e + 1) % 4;
    const int ni = std::min(i + ci[a], i + ci[b]), nj = std::min(j + cj[a], j + cj[b]);
    const int axis = ci[a] != ci[b] ? 0 : 1;
    return (static_cast<std::uint64_t>(nj) * n + static_cast<std::uint64_t>(ni)) * 2 + axis;
  };
  const auto vertex = [&](std::uint64_t id) {
    auto [it, inserted] = vertex_of.emplace(id, static_cast<std::uint32_t>(out.vertices.size()));
    if (inserted) {
      const std::size_t node = id / 2;
      const int axis = static_cast<int>(id % 2);
      const std::size_t i = node % n, j = node / n;
      const double f0 = f.values[node], f1 = f.values[node + (axis == 0 ? 1 : n)];
      const double t = std::clamp((iso - f0) / (f1 - f0), 1e-6, 1.0 - 1e-6);
      Vec2 p{double(i) * h, double(j) * h};
      (axis == 0 ? p.x : p.y) += t * h;
      out.vertices.push_back(p);
    }
    return it->second;
  };

  for (int j = 0; j < r; ++j)
    for (int i = 0; i < r; ++i) {
      bool in[4];
      Vec2 corner[4];
      int cuts = 0;
      for (int c = 0; c < 4; ++c) {
        in[c] = f.at(i + ci[c], j + cj[c]) > iso;
        corner[c] = {double(ci[c]), double(cj[c])};
      }
      for (int c = 0; c < 4; ++c) cuts += in[c] != in[(c + 1) % 4];
      if (cuts == 0) continue;
      std::vector<std::array<int, 3>> segs;  // {edge, edge, inside corner}
      if (cuts == 2) {
        int e_a = -1, e_b = -1, ref = -1;
        for (int c = 0; c < 4; ++c) {
          if (in[c] && !in[(c + 1) % 4]) e_b = c, ref = c;
          if (!in[c] && in[(c + 1) % 4]) e_a = c;
        }
        segs.push_back({e_a, e_b, ref});
      } else {
        for (int c = 0; c < 4; ++c)
          if (in[c]) segs.push_back({(c + 3) % 4, c, c});
      }
      for (auto [ea, eb, ref] : segs) {
        const auto mid = [&](int e) { return (corner[e] + corner[(e + 1) % 4]) * 0.5; };
        if (cross(mid(eb) - mid(ea), corner[ref] - mid(ea)) < 0.0) std::swap(ea, eb);
        out.segments.push_back({vertex(grid_edge(i, j, ea)), vertex(grid_edge(i, j, eb))});
      }
    }
  return out;
}

std::vector<std::vector<std::uint32_t>> closed_loops(const Curve& c) {
  std::vector<std::int64_t> next(c.vertices.size(), -1);
  std::vector<int> in_deg(c.vertices.size(), 0);
  for (const auto& s : c.segments) {
    if (next[s[0]] != -1) throw GeometryError("iso-curve vertex with two outgoing segments");
    next[s[0]] = s[1];
    ++in_deg[s[1]];
  }
  for (std::size_t v = 0; v < c.vertices.size(); ++v)
    if (next[v] < 0 || in_deg[v] != 1) throw GeometryError("iso-curve is not closed");
  std::vector<std::vector<std::uint32_t>> loops;
  std::vector<bool> seen(c.vertices.size(), false);
  for (std::uint32_t start = 0; start < c.vertices.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::uint32_t> loop;
    for (auto v = start; !seen[v]; v = static_cast<std::uint32_t>(next[v])) {
      seen[v] = true;
      loop.push_back(v);
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

Samples update_normals(Samples s, const Curve& c, int k) {
  const std::size_t n = s.size();
  if (n == 0 || c.empty()) return s;
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  std::vector<Vec2> sum(n);
  std::vector<std::pair<double, std::uint32_t>> d(n);
  for (std::size_t seg = 0; seg < c.segments.size(); ++seg) {
    const Vec2 m = c.midpoint(seg);
    for (std::uint32_t i = 0; i < n; ++i) {
      const Vec2 diff = s.positions[i] - m;
      d[i] = {dot(diff, diff), i};
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(take), d.end());
    const Vec2 w = c.inward_normal(seg) * c.length(seg);
    for (std::size_t q = 0; q < take; ++q) sum[d[q].second] = sum[d[q].second] + w;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double len = norm(sum[i]);
    if (len >= 1e-12) s.normals[i] = sum[i] * (1.0 / len);
  }
  return s;
}

void write_svg(const std::string& path, const Curve& curve, const Samples& samples) {
  constexpr double kSize = 600.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
     << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const auto px = [](Vec2 p) { return Vec2{p.x * kSize, (1.0 - p.y) * kSize}; };
  for (std::size_t s = 0; s < curve.segments.size(); ++s) {
    const Vec2 a = px(curve.vertices[curve.segments[s][0]]), b = px(curve.vertices[curve.segments[s][1]]);
    os << "<line x1=\"" << a.x << "\" y1=\"" << a.y << "\" x2=\"" << b.x << "\" y2=\"" << b.y
       << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec2 a = px(samples.positions[i]);
    const Vec2 b = px(samples.positions[i] + samples.normals[i] * 0.03);
    os << "<circle cx=\"" << a.x << "\" cy=\"" << a.y << "\" r=\"1.5\" fill=\"#1f5fbf\"/>"
       << "<line x1=\"" << a.x << "\" y1=\"" << a.y << "\" x2=\"" << b.x << "\" y2=\"" << b.y
       << "\" stroke=\"#d04010\" stroke-width=\"1\"/>\n";
  }
  os << "</svg>\n";
  io::write_file_atomic(path, os.str());
}

Result run_ipsr_2d(std::span<const Vec2> points, const Config& config) {
  if (config.max_iters < 1 || config.max_iters > 1000) throw ConfigError("max-iters must be in [1, 1000]");
  if (!(config.delta > 0.0)) throw ConfigError("delta must be > 0");
  if (config.k < 1) throw ConfigError("k must be >= 1");
  if (points.size() < 3) throw GeometryError("at least 3 input points are required");

  const Transform2 tf = fit_unit_square(points, config.padding);
  std::vector<Vec2> domain;
  domain.reserve(points.size());
  for (const auto& p : points) domain.push_back(tf.to_domain(p));
  Samples samples = random_init(build_samples(domain, config.depth), config.seed);
  if (config.init)
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Vec2 n = config.init(tf.to_world(samples.positions[i]));
      if (norm(n) > 0.0) samples.normals[i] = n * (1.0 / norm(n));
    }
  const int r = 1 << config.depth;

  const auto inward = [&](const Samples& s) {
    if (!config.truth) return -1.0;
    std::size_t good = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (dot(s.normals[i], config.truth(tf.to_world(s.positions[i]))) > 0.0) ++good;
    return static_cast<double>(good) / static_cast<double>(s.size());
  };
  if (!config.svg_dir.empty()) std::filesystem::create_directories(config.svg_dir);

  Result result;
  result.initial_inward = inward(samples);
  int empty_streak = 0;
  for (int it = 1; it <= config.max_iters; ++it) {
    const Field f = solve(samples, r, config.alpha, config.solver_tol);
    Report rep;
    rep.iter = it;
    rep.iso = mean_sample_value(f, samples);
    const Curve curve = marching_squares(f, rep.iso);
    rep.segments = curve.segments.size();
    if (curve.empty()) {
      if (++empty_streak >= 3) throw CollapseError("field collapsed: empty iso-curve on 3 consecutive iterations");
      rep.inward = inward(samples);
      result.reports.push_back(rep);
      continue;
    }
    empty_streak = 0;
    rep.loops = closed_loops(curve).size();
    Samples updated = update_normals(samples, curve, config.k);
    std::vector<double> changes(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
      changes[i] = norm(updated.normals[i] - samples.normals[i]);
    rep.d = top_fraction_mean(changes);
    samples = std::move(updated);
    rep.inward = inward(samples);
    result.reports.push_back(rep);
    if (!config.svg_dir.empty())
      write_svg(config.svg_dir + "/iter_" + std::to_string(it) + ".svg", curve, samples);
    if (it > 1 && rep.d < config.delta) {
      result.converged = true;
      break;
    }
  }

  const Field f = solve(samples, r, config.alpha, config.solver_tol);
  Curve curve = marching_squares(f, mean_sample_value(f, samples));
  if (curve.empty()) throw CollapseError("field collapsed: final extraction is empty");
  result.loops = closed_loops(curve);
  if (!config.svg_dir.empty()) write_svg(config.svg_dir + "/final.svg", curve, samples);
  for (auto& v : curve.vertices) v = tf.to_world(v);
  result.curve = std::move(curve);
  result.samples = std::move(samples);
  return result;
}

std::vector<Vec2> ellipse_points(std::size_t n, double a, double b, Vec2 center) {
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    pts.push_back({center.x + a * std::cos(t), center.y + b * std::sin(t)});
  }
  return pts;
}

std::vector<Vec2> circle_points(std::size_t n, double r, Vec2 center) {
  return ellipse_points(n, r, r, center);
}

Vec2 ellipse_inward(Vec2 p, double a, double b, Vec2 center) {
  const Vec2 q = p - center;
  const Vec2 g{-q.x / (a * a), -q.y / (b * b)};
  const double len = norm(g);
  return len > 0.0 ? g * (1.0 / len) : Vec2{};
}

}  // namespace ipsr::toy2d
