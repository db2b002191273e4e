// Polygonal mesh data model: vertices, CCW element loops, derived edge
// connectivity with adjacency, boundary flags, and an invariant checker.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pvem {

using Vec2 = Eigen::Vector2d;

/// Undirected mesh edge with element adjacency. Canonical orientation is
/// from the lower to the higher vertex index.
struct MeshEdge {
  int a = -1;        ///< first endpoint, a < b
  int b = -1;        ///< second endpoint
  int elem[2] = {-1, -1};  ///< adjacent elements; elem[1] == -1 on the boundary

  bool boundary() const { return elem[1] < 0; }
};

/// Conforming decomposition of a polygonal domain into simple CCW polygons.
///
/// Derived connectivity (edges, per-element edge lists, boundary flags) is
/// rebuilt by finalize(); generators and the loader call it, code that edits
/// vertices/elements by hand must call it again.
struct PolyMesh {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> elements;  ///< CCW vertex-index loops

  // Derived by finalize().
  std::vector<MeshEdge> edges;
  std::vector<std::vector<int>> element_edges;  ///< edge ids in loop order
  std::vector<bool> boundary_vertex;
  std::vector<bool> boundary_edge;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  /// Rebuild edges, per-element edge lists and boundary flags.
  /// Throws if an edge is shared by more than two elements.
  void finalize() {
    edges.clear();
    element_edges.assign(elements.size(), {});
    std::map<std::pair<int, int>, int> edge_of;
    for (int e = 0; e < n_elements(); ++e) {
      const auto& loop = elements[e];
      const int k = static_cast<int>(loop.size());
      element_edges[e].resize(k);
      for (int i = 0; i < k; ++i) {
        const int va = loop[i];
        const int vb = loop[(i + 1) % k];
        const auto key = std::minmax(va, vb);
        auto it = edge_of.find(key);
        int id;
        if (it == edge_of.end()) {
          id = n_edges();
          edge_of.emplace(key, id);
          MeshEdge me;
          me.a = key.first;
          me.b = key.second;
          me.elem[0] = e;
          edges.push_back(me);
        } else {
          id = it->second;
          if (edges[id].elem[1] >= 0) {
            throw std::runtime_error("PolyMesh::finalize: edge (" +
                                     std::to_string(key.first) + "," +
                                     std::to_string(key.second) +
                                     ") shared by more than two elements");
          }
          edges[id].elem[1] = e;
        }
        element_edges[e][i] = id;
      }
    }
    boundary_edge.assign(edges.size(), false);
    boundary_vertex.assign(vertices.size(), false);
    for (int i = 0; i < n_edges(); ++i) {
      if (edges[i].boundary()) {
        boundary_edge[i] = true;
        boundary_vertex[edges[i].a] = true;
        boundary_vertex[edges[i].b] = true;
      }
    }
  }

  bool operator==(const PolyMesh& o) const {
    if (vertices.size() != o.vertices.size() || elements != o.elements) return false;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i].x() != o.vertices[i].x() || vertices[i].y() != o.vertices[i].y())
        return false;
    return true;
  }
};

/// Signed (shoelace) area of an element loop; positive for CCW.
inline double element_signed_area(const PolyMesh& mesh, int e) {
  const auto& loop = mesh.elements[e];
  const int k = static_cast<int>(loop.size());
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    const Vec2& p = mesh.vertices[loop[i]];
    const Vec2& q = mesh.vertices[loop[(i + 1) % k]];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * s;
}

/// Per-element geometric data used by quadrature and local VEM operators.
struct ElementGeometry {
  double area = 0.0;
  Vec2 centroid = Vec2::Zero();  ///< area barycenter x_E
  double diameter = 0.0;         ///< h_E, max pairwise vertex distance
  std::vector<Vec2> vertex;      ///< loop coordinates, CCW
  std::vector<double> edge_length;
  std::vector<Vec2> edge_tangent;  ///< unit, along the loop direction
  std::vector<Vec2> edge_normal;   ///< unit, outward (tangent rotated by -90 deg)
};

inline ElementGeometry element_geometry(const PolyMesh& mesh, int e) {
  ElementGeometry g;
  const auto& loop = mesh.elements[e];
  const int k = static_cast<int>(loop.size());
  g.vertex.resize(k);
  for (int i = 0; i < k; ++i) g.vertex[i] = mesh.vertices[loop[i]];

  double a2 = 0.0;  // twice the signed area
  Vec2 c = Vec2::Zero();
  for (int i = 0; i < k; ++i) {
    const Vec2& p = g.vertex[i];
    const Vec2& q = g.vertex[(i + 1) % k];
    const double cross = p.x() * q.y() - q.x() * p.y();
    a2 += cross;
    c += cross * (p + q);
  }
  g.area = 0.5 * a2;
  if (g.area <= 0.0)
    throw std::runtime_error("element_geometry: element " + std::to_string(e) +
                             " has non-positive area");
  g.centroid = c / (3.0 * a2);

  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      g.diameter = std::max(g.diameter, (g.vertex[i] - g.vertex[j]).norm());

  g.edge_length.resize(k);
  g.edge_tangent.resize(k);
  g.edge_normal.resize(k);
  for (int i = 0; i < k; ++i) {
    const Vec2 d = g.vertex[(i + 1) % k] - g.vertex[i];
    g.edge_length[i] = d.norm();
    g.edge_tangent[i] = d / g.edge_length[i];
    // outward normal of a CCW loop
    g.edge_normal[i] = Vec2(g.edge_tangent[i].y(), -g.edge_tangent[i].x());
  }
  return g;
}

/// Result of validate_mesh: a list of violated invariants, empty when valid.
struct MeshDiagnostics {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v << "\n";
    return os.str();
  }
};

namespace detail {

inline bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                                        const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 &&
         o3 != 0 && o4 != 0;
}

}  // namespace detail

/// Check all PolyMesh invariants. Never throws; returns the violations found.
///
/// Checks: loop validity (indices in range, length >= 3, no repeated vertex
/// in a loop), positive signed area / CCW orientation, simplicity, edge
/// adjacency counts, opposite traversal of interior edges, geometric vertex
/// duplication (non-conforming contact), boundary-flag consistency, and
/// closure of the total area against the boundary loop.
inline MeshDiagnostics validate_mesh(const PolyMesh& mesh) {
  MeshDiagnostics diag;
  auto fail = [&](const std::string& msg) { diag.violations.push_back(msg); };

  const int nv = mesh.n_vertices();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& loop = mesh.elements[e];
    const int k = static_cast<int>(loop.size());
    if (k < 3) {
      fail("element " + std::to_string(e) + ": loop has fewer than 3 vertices");
      continue;
    }
    bool bad_index = false;
    for (int v : loop)
      if (v < 0 || v >= nv) {
        fail("element " + std::to_string(e) + ": vertex index " + std::to_string(v) +
             " out of range");
        bad_index = true;
      }
    if (bad_index) continue;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (loop[i] == loop[j])
          fail("element " + std::to_string(e) + ": repeated vertex " +
               std::to_string(loop[i]) + " in loop");
    const double area = element_signed_area(mesh, e);
    if (!(area > 0.0))
      fail("element " + std::to_string(e) + ": orientation (signed area " +
           std::to_string(area) + " <= 0, loop not CCW)");
    // simplicity: no proper crossing between non-adjacent edges
    for (int i = 0; i < k; ++i) {
      for (int j = i + 2; j < k; ++j) {
        if (i == 0 && j == k - 1) continue;  // adjacent around the loop
        if (detail::segments_properly_intersect(
                mesh.vertices[loop[i]], mesh.vertices[loop[(i + 1) % k]],
                mesh.vertices[loop[j]], mesh.vertices[loop[(j + 1) % k]]))
          fail("element " + std::to_string(e) + ": self-intersecting loop (edges " +
               std::to_string(i) + " and " + std::to_string(j) + ")");
      }
    }
  }
  if (!diag.ok()) return diag;  // connectivity checks need sane loops

  // Edge adjacency, rebuilt from scratch so loaded meshes are fully checked.
  // Each directed edge should be matched by exactly one reverse twin
  // (interior) or none (boundary).
  std::map<std::pair<int, int>, std::vector<int>> uses;  // (min,max) -> elements
  std::map<std::pair<int, int>, int> directed;           // (from,to) -> count
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& loop = mesh.elements[e];
    const int k = static_cast<int>(loop.size());
    for (int i = 0; i < k; ++i) {
      const int va = loop[i], vb = loop[(i + 1) % k];
      uses[std::minmax(va, vb)].push_back(e);
      directed[{va, vb}]++;
    }
  }
  double boundary_loop_area2 = 0.0;
  int n_boundary_edges = 0;
  for (const auto& [key, elems] : uses) {
    if (elems.size() > 2)
      fail("edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
           "): non-conforming edge (shared by " + std::to_string(elems.size()) +
           " elements)");
    if (elems.size() == 2) {
      // the two traversals must be opposite
      if (directed[{key.first, key.second}] != 1 || directed[{key.second, key.first}] != 1)
        fail("edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
             "): non-conforming edge (traversed twice in the same direction)");
    } else {
      ++n_boundary_edges;
      // accumulate the boundary loop area with the element's orientation
      const bool fwd = directed.count({key.first, key.second}) > 0;
      const Vec2& p = mesh.vertices[fwd ? key.first : key.second];
      const Vec2& q = mesh.vertices[fwd ? key.second : key.first];
      boundary_loop_area2 += p.x() * q.y() - q.x() * p.y();
    }
  }

  // geometrically duplicated vertices break conformity even when each loop is fine
  {
    std::map<std::pair<long long, long long>, int> seen;
    for (int v = 0; v < nv; ++v) {
      const auto key = std::make_pair(static_cast<long long>(std::llround(mesh.vertices[v].x() * 1e12)),
                                      static_cast<long long>(std::llround(mesh.vertices[v].y() * 1e12)));
      auto [it, inserted] = seen.emplace(key, v);
      if (!inserted)
        fail("vertices " + std::to_string(it->second) + " and " + std::to_string(v) +
             ": duplicated vertex coordinates -> non-conforming edge");
    }
  }

  // total element area must close against the boundary loop
  double total_area = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) total_area += element_signed_area(mesh, e);
  const double domain_area = 0.5 * boundary_loop_area2;
  if (domain_area > 0 &&
      std::abs(total_area - domain_area) > 1e-12 * std::max(1.0, domain_area))
    fail("area closure: sum of element areas " + std::to_string(total_area) +
         " != boundary loop area " + std::to_string(domain_area));

  // boundary flags, when present, must mark exactly the entities adjacent to one element
  if (mesh.boundary_edge.size() == uses.size() && !mesh.edges.empty()) {
    for (int i = 0; i < mesh.n_edges(); ++i) {
      const auto key = std::make_pair(mesh.edges[i].a, mesh.edges[i].b);
      auto it = uses.find(key);
      const bool is_b = (it != uses.end() && it->second.size() == 1);
      if (mesh.boundary_edge[i] != is_b)
        fail("edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
             "): boundary flag inconsistent with adjacency");
    }
  }
  return diag;
}

}  // namespace pvem
