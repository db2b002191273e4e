// Prolongation between the degree-(p-1) and degree-p dof spaces on the same
// mesh. Vertex dofs are copied, edge dofs are re-evaluated through 1D Lagrange
// interpolation on the Gauss-Lobatto nodes, moments of order <= p-3 carry
// over unchanged, and the order-(p-2) moment rows vanish: that is where the
// enhancing constraints of the auxiliary space act. The restriction is the
// transpose, applied on the fly and never stored.

#pragma once

#include <pvem/util/lagrange.hpp>
#include <pvem/vem/assembly.hpp>
#include <pvem/vem/dof_map.hpp>

#include <Eigen/Sparse>

#include <stdexcept>

namespace pvem {

struct TransferPair {
  SparseMat P;       ///< full dof spaces, fine x coarse
  SparseMat P_free;  ///< restriction of P to free dofs on both sides

  /// Restriction on free dofs: transpose of the prolongation under the
  /// Euclidean dof inner product.
  Eigen::VectorXd restrict_free(const Eigen::VectorXd& fine) const {
    return P_free.transpose() * fine;
  }
};

/// Values of a degree-(p-1) edge polynomial at the p+1 fine Gauss-Lobatto
/// nodes, from its values at the p coarse nodes.
inline Eigen::MatrixXd edge_prolongation_1d(int p) {
  if (p < 2) throw std::invalid_argument("edge_prolongation_1d: p must be >= 2");
  return lagrange_eval_matrix(gauss_lobatto_1d(p).nodes, gauss_lobatto_1d(p + 1).nodes);
}

inline TransferPair build_prolongation(const DofMap& coarse, const DofMap& fine,
                                       const PolyMesh& mesh) {
  if (fine.p != coarse.p + 1)
    throw std::invalid_argument(
        "build_prolongation: degrees must differ by exactly 1 (got " +
        std::to_string(coarse.p) + " -> " + std::to_string(fine.p) + ")");
  const int p = fine.p;

  std::vector<Eigen::Triplet<double>> triplets;
  for (int v = 0; v < mesh.n_vertices(); ++v) triplets.emplace_back(v, v, 1.0);

  const Eigen::MatrixXd em = edge_prolongation_1d(p);  // (p+1) x p, node order -1 .. +1
  for (int e = 0; e < mesh.n_edges(); ++e) {
    // coarse data on this edge: [vertex a, p-2 internal dofs, vertex b]
    std::vector<int> coarse_cols(p);
    coarse_cols[0] = coarse.vertex_dof(mesh.edges[e].a);
    for (int c = 0; c < p - 2; ++c) coarse_cols[c + 1] = coarse.edge_dof(e, c);
    coarse_cols[p - 1] = coarse.vertex_dof(mesh.edges[e].b);
    for (int j = 0; j < p - 1; ++j) {
      const int row = fine.edge_dof(e, j);
      for (int c = 0; c < p; ++c) triplets.emplace_back(row, coarse_cols[c], em(j + 1, c));
    }
  }

  const int n_keep = poly_space_dim(p - 3);  // orders <= p-3 carry over
  for (int el = 0; el < mesh.n_elements(); ++el)
    for (int k = 0; k < n_keep; ++k)
      triplets.emplace_back(fine.moment_dof(el, k), coarse.moment_dof(el, k), 1.0);

  TransferPair tp;
  tp.P.resize(fine.n_total, coarse.n_total);
  tp.P.setFromTriplets(triplets.begin(), triplets.end());
  tp.P.makeCompressed();

  std::vector<Eigen::Triplet<double>> free_triplets;
  for (int c = 0; c < tp.P.outerSize(); ++c)
    for (SparseMat::InnerIterator it(tp.P, c); it; ++it) {
      const int fr = fine.free_of_global[static_cast<int>(it.row())];
      const int fc = coarse.free_of_global[static_cast<int>(it.col())];
      if (fr >= 0 && fc >= 0) free_triplets.emplace_back(fr, fc, it.value());
    }
  tp.P_free.resize(fine.n_free, coarse.n_free);
  tp.P_free.setFromTriplets(free_triplets.begin(), free_triplets.end());
  tp.P_free.makeCompressed();
  return tp;
}

/// Restriction on full dof vectors.
inline Eigen::VectorXd apply_restriction(const TransferPair& tp,
                                         const Eigen::VectorXd& fine) {
  if (fine.size() != tp.P.rows())
    throw std::invalid_argument("apply_restriction: dimension mismatch");
  return tp.P.transpose() * fine;
}

}  // namespace pvem
