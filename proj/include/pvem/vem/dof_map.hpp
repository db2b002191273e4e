// Degree-of-freedom enumeration for the degree-p space: vertex values,
// p-1 Gauss-Lobatto values inside each edge, and per-element moments against
// a basis of P_{p-2}. Global layout is [vertices | edge internal | moments].

#pragma once

#include <pvem/geometry/mesh.hpp>
#include <pvem/quadrature/rules1d.hpp>
#include <pvem/quadrature/scaled_monomials.hpp>

#include <stdexcept>
#include <vector>

namespace pvem {

/// Interior nodes of the (p+1)-point Gauss-Lobatto rule mapped onto the edge
/// from its lower-index to its higher-index vertex. Both adjacent elements
/// see these exact coordinates.
inline std::vector<Vec2> edge_internal_nodes(const PolyMesh& mesh, int edge, int p) {
  std::vector<Vec2> nodes;
  if (p < 2) return nodes;
  const Vec2& a = mesh.vertices[mesh.edges[edge].a];
  const Vec2& b = mesh.vertices[mesh.edges[edge].b];
  const QuadRule1D& gl = gauss_lobatto_1d(p + 1);
  nodes.reserve(p - 1);
  for (int j = 1; j <= p - 1; ++j)
    nodes.push_back(a + 0.5 * (gl.nodes[j] + 1.0) * (b - a));
  return nodes;
}

struct DofMap {
  int p = 1;
  int n_vertex_dofs = 0;
  int n_edge_dofs = 0;    ///< (p-1) per edge
  int n_moment_dofs = 0;  ///< dim P_{p-2} per element
  int n_total = 0;
  int moments_per_element = 0;

  /// Local ordering per element: vertices in loop order, then for each edge in
  /// loop order its internal dofs in traversal direction, then moments in
  /// graded-lex order.
  std::vector<std::vector<int>> element_dofs;

  std::vector<bool> is_boundary;  ///< per global dof; moments are never boundary
  std::vector<Vec2> node;         ///< coordinates of vertex and edge dofs

  std::vector<int> free_of_global;  ///< -1 for Dirichlet dofs
  std::vector<int> global_of_free;
  int n_free = 0;

  int vertex_dof(int v) const { return v; }
  int edge_dof(int e, int j) const { return n_vertex_dofs + e * (p - 1) + j; }
  int moment_dof(int elem, int k) const {
    return n_vertex_dofs + n_edge_dofs + elem * moments_per_element + k;
  }
  int local_dof_count(const PolyMesh& mesh, int elem) const {
    const int k = static_cast<int>(mesh.elements[elem].size());
    return k + k * (p - 1) + moments_per_element;
  }
};

inline DofMap build_dof_map(const PolyMesh& mesh, int p) {
  if (p < 1) throw std::invalid_argument("build_dof_map: p must be >= 1");
  DofMap dm;
  dm.p = p;
  dm.moments_per_element = poly_space_dim(p - 2);
  dm.n_vertex_dofs = mesh.n_vertices();
  dm.n_edge_dofs = (p - 1) * mesh.n_edges();
  dm.n_moment_dofs = dm.moments_per_element * mesh.n_elements();
  dm.n_total = dm.n_vertex_dofs + dm.n_edge_dofs + dm.n_moment_dofs;

  dm.node.resize(dm.n_vertex_dofs + dm.n_edge_dofs);
  for (int v = 0; v < mesh.n_vertices(); ++v) dm.node[v] = mesh.vertices[v];
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto nodes = edge_internal_nodes(mesh, e, p);
    for (int j = 0; j < p - 1; ++j) dm.node[dm.edge_dof(e, j)] = nodes[j];
  }

  dm.is_boundary.assign(dm.n_total, false);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.boundary_vertex[v]) dm.is_boundary[v] = true;
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (mesh.boundary_edge[e])
      for (int j = 0; j < p - 1; ++j) dm.is_boundary[dm.edge_dof(e, j)] = true;

  dm.element_dofs.resize(mesh.n_elements());
  for (int el = 0; el < mesh.n_elements(); ++el) {
    const auto& loop = mesh.elements[el];
    const int k = static_cast<int>(loop.size());
    auto& dofs = dm.element_dofs[el];
    dofs.reserve(k * p + dm.moments_per_element);
    for (int i = 0; i < k; ++i) dofs.push_back(dm.vertex_dof(loop[i]));
    for (int i = 0; i < k; ++i) {
      const int edge = mesh.element_edges[el][i];
      const bool forward = mesh.edges[edge].a == loop[i];
      for (int j = 0; j < p - 1; ++j)
        dofs.push_back(dm.edge_dof(edge, forward ? j : p - 2 - j));
    }
    for (int m = 0; m < dm.moments_per_element; ++m) dofs.push_back(dm.moment_dof(el, m));
  }

  dm.free_of_global.assign(dm.n_total, -1);
  dm.global_of_free.clear();
  for (int i = 0; i < dm.n_total; ++i)
    if (!dm.is_boundary[i]) {
      dm.free_of_global[i] = static_cast<int>(dm.global_of_free.size());
      dm.global_of_free.push_back(i);
    }
  dm.n_free = static_cast<int>(dm.global_of_free.size());
  return dm;
}

}  // namespace pvem
