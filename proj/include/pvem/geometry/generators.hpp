// Generators for the three mesh families used by the experiments: axis-aligned
// squares, quasi-regular hexagons, and Lloyd-regularized Voronoi polygons, all
// on the unit square. Voronoi cells are built by half-plane intersection and
// the global mesh is assembled by snapping coincident cell corners.

#pragma once

#include <pvem/geometry/mesh.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

namespace pvem {

/// Optional report from generate_voronoi_lloyd_mesh.
struct VoronoiDiagnostics {
  int perturbed_seeds = 0;  ///< seeds nudged to break coincident pairs
};

namespace detail {

/// Uniform double in [0,1) from the top 53 bits of the generator output;
/// identical across platforms for a given seed, unlike the std distributions.
inline double canonical_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Keep the part of a convex CCW polygon with (x - point) . dir <= 0
/// (Sutherland-Hodgman against a single half-plane).
inline std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& point,
                                        const Vec2& dir) {
  std::vector<Vec2> out;
  const int k = static_cast<int>(poly.size());
  if (k == 0) return out;
  out.reserve(k + 1);
  double fp = (poly[0] - point).dot(dir);
  for (int i = 0; i < k; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % k];
    const double fq = (q - point).dot(dir);
    if (fp <= 0.0) {
      out.push_back(p);
      if (fq > 0.0) out.push_back(p + (fp / (fp - fq)) * (q - p));
    } else if (fq <= 0.0) {
      out.push_back(p + (fp / (fp - fq)) * (q - p));
    }
    fp = fq;
  }
  return out;
}

/// Voronoi cell of seeds[i] clipped to the unit square.
inline std::vector<Vec2> voronoi_cell(const std::vector<Vec2>& seeds, int i) {
  std::vector<Vec2> cell = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    if (static_cast<int>(j) == i) continue;
    const Vec2 mid = 0.5 * (seeds[i] + seeds[j]);
    const Vec2 dir = seeds[j] - seeds[i];
    cell = clip_halfplane(cell, mid, dir);
    if (cell.empty()) break;
  }
  return cell;
}

inline double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  const int k = static_cast<int>(poly.size());
  for (int i = 0; i < k; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % k];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * s;
}

inline Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  double a2 = 0.0;
  Vec2 c = Vec2::Zero();
  const int k = static_cast<int>(poly.size());
  for (int i = 0; i < k; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % k];
    const double cross = p.x() * q.y() - q.x() * p.y();
    a2 += cross;
    c += cross * (p + q);
  }
  return c / (3.0 * a2);
}

/// Assemble cell polygons into a conforming PolyMesh, merging corners that
/// coincide up to `snap`. Cells compute shared Voronoi vertices independently
/// so the copies differ by rounding; snapping restores exact conformity.
inline PolyMesh mesh_from_cells(const std::vector<std::vector<Vec2>>& cells,
                                double snap = 1e-9) {
  PolyMesh mesh;
  std::map<std::pair<long long, long long>, int> bucket;  // quantized coord -> vertex id
  auto vertex_id = [&](const Vec2& x) {
    const long long qx = static_cast<long long>(std::floor(x.x() / snap));
    const long long qy = static_cast<long long>(std::floor(x.y() / snap));
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = bucket.find({qx + dx, qy + dy});
        if (it != bucket.end() && (mesh.vertices[it->second] - x).norm() <= snap)
          return it->second;
      }
    const int id = mesh.n_vertices();
    mesh.vertices.push_back(x);
    bucket[{qx, qy}] = id;
    return id;
  };

  for (const auto& cell : cells) {
    std::vector<int> loop;
    for (const Vec2& x : cell) {
      const int id = vertex_id(x);
      if (loop.empty() || loop.back() != id) loop.push_back(id);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    if (loop.size() >= 3) mesh.elements.push_back(std::move(loop));
  }
  mesh.finalize();
  return mesh;
}

}  // namespace detail

/// n x n axis-aligned squares on the unit square.
inline PolyMesh generate_square_mesh(int n) {
  if (n < 1) throw std::invalid_argument("generate_square_mesh: n must be >= 1");
  PolyMesh mesh;
  mesh.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  mesh.elements.reserve(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      mesh.elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  mesh.finalize();
  return mesh;
}

/// Quasi-regular hexagon tiling of the unit square with ~n cells per row,
/// realized as the clipped Voronoi diagram of a triangular seed lattice.
/// Boundary cells come out as clipped pentagons/quads; all cells are convex.
inline PolyMesh generate_hexagonal_mesh(int n) {
  if (n < 1) throw std::invalid_argument("generate_hexagonal_mesh: n must be >= 1");
  const double dx = 1.0 / n;
  const int rows = std::max(1, static_cast<int>(std::lround(n * 2.0 / std::sqrt(3.0))));
  const double dy = 1.0 / rows;
  std::vector<Vec2> seeds;
  for (int j = 0; j < rows; ++j) {
    const double y = (j + 0.5) * dy;
    const double off = (j % 2 == 0) ? 0.25 * dx : 0.75 * dx;
    for (int i = 0; i < n; ++i) seeds.emplace_back(off + i * dx, y);
  }
  std::vector<std::vector<Vec2>> cells;
  cells.reserve(seeds.size());
  for (int i = 0; i < static_cast<int>(seeds.size()); ++i) {
    auto cell = detail::voronoi_cell(seeds, i);
    if (!cell.empty()) cells.push_back(std::move(cell));
  }
  return detail::mesh_from_cells(cells);
}

/// Lloyd-regularized clipped Voronoi mesh of explicit seed points in the
/// unit square. Coincident seeds make the bisector half-planes degenerate;
/// such seeds are nudged apart deterministically and the diagnostics record
/// how many.
inline PolyMesh voronoi_lloyd_mesh_from_seeds(std::vector<Vec2> seeds, int lloyd_iters,
                                              std::uint64_t rng_seed,
                                              VoronoiDiagnostics* diag = nullptr) {
  const int n_seeds = static_cast<int>(seeds.size());
  if (n_seeds < 2)
    throw std::invalid_argument("voronoi_lloyd_mesh_from_seeds: need at least 2 seeds");
  if (lloyd_iters < 0)
    throw std::invalid_argument("voronoi_lloyd_mesh_from_seeds: lloyd_iters must be >= 0");

  std::mt19937_64 rng(rng_seed ^ 0x9e3779b97f4a7c15ull);
  for (int i = 0; i < n_seeds; ++i)
    for (int j = 0; j < i; ++j)
      while ((seeds[i] - seeds[j]).norm() < 1e-12) {
        seeds[i] += Vec2(1e-8 * (1.0 + detail::canonical_double(rng)),
                         1e-8 * (1.0 + detail::canonical_double(rng)));
        if (diag) diag->perturbed_seeds++;
      }

  for (int it = 0; it < lloyd_iters; ++it) {
    std::vector<Vec2> next = seeds;
    for (int i = 0; i < n_seeds; ++i) {
      const auto cell = detail::voronoi_cell(seeds, i);
      if (cell.size() >= 3) next[i] = detail::polygon_centroid(cell);
    }
    seeds.swap(next);
  }

  std::vector<std::vector<Vec2>> cells;
  cells.reserve(n_seeds);
  for (int i = 0; i < n_seeds; ++i) {
    auto cell = detail::voronoi_cell(seeds, i);
    if (!cell.empty()) cells.push_back(std::move(cell));
  }
  return detail::mesh_from_cells(cells);
}

/// Voronoi diagram of n_seeds random points in the unit square, regularized
/// by lloyd_iters centroid updates. Deterministic for a given rng_seed.
inline PolyMesh generate_voronoi_lloyd_mesh(int n_seeds, int lloyd_iters,
                                            std::uint64_t rng_seed,
                                            VoronoiDiagnostics* diag = nullptr) {
  if (n_seeds < 2)
    throw std::invalid_argument("generate_voronoi_lloyd_mesh: n_seeds must be >= 2");
  std::mt19937_64 rng(rng_seed);
  std::vector<Vec2> seeds(n_seeds);
  for (auto& s : seeds)
    s = Vec2(detail::canonical_double(rng), detail::canonical_double(rng));
  return voronoi_lloyd_mesh_from_seeds(std::move(seeds), lloyd_iters, rng_seed, diag);
}

}  // namespace pvem
