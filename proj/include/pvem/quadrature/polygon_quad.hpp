// Quadrature on polygons by sub-triangulation: fan from the barycenter when
// the element is star-shaped with respect to it, ear clipping otherwise, with
// a Duffy-type product Gauss rule on each triangle.

#pragma once

#include <pvem/geometry/mesh.hpp>
#include <pvem/quadrature/rules1d.hpp>

#include <array>
#include <functional>
#include <vector>

namespace pvem {

/// Quadrature rule over a polygonal element; weights carry the area measure.
struct PolygonQuad {
  std::vector<Vec2> points;
  std::vector<double> weights;
  bool used_ear_clipping = false;  ///< barycenter fan failed, fell back

  int size() const { return static_cast<int>(points.size()); }

  double integrate(const std::function<double(const Vec2&)>& f) const {
    double s = 0.0;
    for (int q = 0; q < size(); ++q) s += weights[q] * f(points[q]);
    return s;
  }
};

namespace detail {

/// Rule on the reference triangle {(0,0),(1,0),(0,1)}, exact on P_k.
/// Collapsed square x = u, y = v(1-u): a degree-k monomial pulls back to
/// degree <= k+1 in u and <= k in v.
inline void reference_triangle_rule(int k, std::vector<Vec2>& pts, std::vector<double>& wts) {
  const int nu = (k + 3) / 2;  // 2*nu - 1 >= k + 1
  const int nv = (k + 2) / 2;  // 2*nv - 1 >= k
  const QuadRule1D& ru = gauss_legendre_1d(nu);
  const QuadRule1D& rv = gauss_legendre_1d(nv);
  pts.clear();
  wts.clear();
  pts.reserve(nu * nv);
  wts.reserve(nu * nv);
  for (int i = 0; i < nu; ++i) {
    const double u = 0.5 * (ru.nodes[i] + 1.0);
    const double wu = 0.5 * ru.weights[i];
    for (int j = 0; j < nv; ++j) {
      const double v = 0.5 * (rv.nodes[j] + 1.0);
      const double wv = 0.5 * rv.weights[j];
      pts.emplace_back(u, v * (1.0 - u));
      wts.push_back(wu * wv * (1.0 - u));
    }
  }
}

inline bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& x) {
  bool inside = false;
  const int k = static_cast<int>(poly.size());
  for (int i = 0, j = k - 1; i < k; j = i++) {
    if ((poly[i].y() > x.y()) != (poly[j].y() > x.y()) &&
        x.x() < (poly[j].x() - poly[i].x()) * (x.y() - poly[i].y()) /
                    (poly[j].y() - poly[i].y()) +
                poly[i].x())
      inside = !inside;
  }
  return inside;
}

/// Ear clipping of a simple CCW polygon into triangles (vertex index triples).
inline std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& poly) {
  std::vector<int> idx(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;
  auto cross2 = [&](int a, int b, int c) {
    const Vec2 u = poly[b] - poly[a], v = poly[c] - poly[a];
    return u.x() * v.y() - u.y() * v.x();
  };
  auto in_tri = [&](int a, int b, int c, int p) {
    const double d1 = cross2(a, b, p), d2 = cross2(b, c, p), d3 = cross2(c, a, p);
    return d1 >= 0 && d2 >= 0 && d3 >= 0;
  };
  int guard = 0;
  while (idx.size() > 3) {
    const int n = static_cast<int>(idx.size());
    bool clipped = false;
    for (int i = 0; i < n; ++i) {
      const int a = idx[(i + n - 1) % n], b = idx[i], c = idx[(i + 1) % n];
      if (cross2(a, b, c) <= 0) continue;  // reflex corner
      bool ear = true;
      for (int j = 0; j < n; ++j) {
        const int p = idx[j];
        if (p == a || p == b || p == c) continue;
        if (in_tri(a, b, c, p)) {
          ear = false;
          break;
        }
      }
      if (ear) {
        tris.push_back({a, b, c});
        idx.erase(idx.begin() + i);
        clipped = true;
        break;
      }
    }
    if (!clipped || ++guard > 10000)
      throw std::runtime_error("ear_clip: failed to triangulate polygon");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

inline void map_triangle_rule(const Vec2& p0, const Vec2& p1, const Vec2& p2,
                              const std::vector<Vec2>& ref_pts,
                              const std::vector<double>& ref_wts, PolygonQuad& out) {
  const Vec2 e1 = p1 - p0, e2 = p2 - p0;
  const double jac = e1.x() * e2.y() - e1.y() * e2.x();  // = 2*area, > 0 for CCW
  for (std::size_t q = 0; q < ref_pts.size(); ++q) {
    out.points.push_back(p0 + ref_pts[q].x() * e1 + ref_pts[q].y() * e2);
    out.weights.push_back(ref_wts[q] * jac);
  }
}

}  // namespace detail

/// Quadrature over the polygon `geom`, exact for P_k.
inline PolygonQuad polygon_quadrature(const ElementGeometry& geom, int k) {
  if (k < 0) throw std::invalid_argument("polygon_quadrature: order must be >= 0");
  std::vector<Vec2> ref_pts;
  std::vector<double> ref_wts;
  detail::reference_triangle_rule(k, ref_pts, ref_wts);

  PolygonQuad quad;
  const int nvert = static_cast<int>(geom.vertex.size());

  // fan from the barycenter when every fan triangle is CCW with positive area
  bool fan_ok = detail::point_in_polygon(geom.vertex, geom.centroid);
  if (fan_ok) {
    for (int i = 0; i < nvert && fan_ok; ++i) {
      const Vec2 u = geom.vertex[i] - geom.centroid;
      const Vec2 v = geom.vertex[(i + 1) % nvert] - geom.centroid;
      if (u.x() * v.y() - u.y() * v.x() <= 0) fan_ok = false;
    }
  }
  if (fan_ok) {
    quad.points.reserve(nvert * ref_pts.size());
    quad.weights.reserve(nvert * ref_pts.size());
    for (int i = 0; i < nvert; ++i)
      detail::map_triangle_rule(geom.centroid, geom.vertex[i], geom.vertex[(i + 1) % nvert],
                                ref_pts, ref_wts, quad);
  } else {
    quad.used_ear_clipping = true;
    for (const auto& t : detail::ear_clip(geom.vertex))
      detail::map_triangle_rule(geom.vertex[t[0]], geom.vertex[t[1]], geom.vertex[t[2]],
                                ref_pts, ref_wts, quad);
  }
  return quad;
}

}  // namespace pvem
