// Global VEM system: scatter-add of local stiffness/load, Dirichlet handling
// by interpolation at boundary dof nodes and symmetric elimination with the
// lifting moved to the right-hand side.

#pragma once

#include <pvem/vem/dof_map.hpp>
#include <pvem/vem/local_element.hpp>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <charconv>
#include <fstream>
#include <string_view>
#include <vector>

namespace pvem {

using SparseMat = Eigen::SparseMatrix<double>;

/// Assembled Poisson system on the free (non-Dirichlet) dofs.
struct GlobalSystem {
  DofMap dofs;
  SparseMat K;                        ///< free x free, SPD
  Eigen::VectorXd rhs;                ///< free, lifting included
  Eigen::VectorXd dirichlet_values;   ///< full length, zero on free dofs

  /// Expand a free-dof vector to the full dof vector with boundary values.
  Eigen::VectorXd full_vector(const Eigen::VectorXd& u_free) const {
    Eigen::VectorXd full = dirichlet_values;
    for (int i = 0; i < dofs.n_free; ++i) full[dofs.global_of_free[i]] = u_free[i];
    return full;
  }
};

inline GlobalSystem assemble_global(const PolyMesh& mesh, int p, const ScalarField& f,
                                    InternalDofMode mode = InternalDofMode::orthonormal,
                                    const ScalarField& dirichlet_g = {}) {
  GlobalSystem sys;
  sys.dofs = build_dof_map(mesh, p);
  const DofMap& dm = sys.dofs;

  sys.dirichlet_values = Eigen::VectorXd::Zero(dm.n_total);
  if (dirichlet_g)
    for (int i = 0; i < dm.n_vertex_dofs + dm.n_edge_dofs; ++i)
      if (dm.is_boundary[i]) sys.dirichlet_values[i] = dirichlet_g(dm.node[i]);

  std::vector<Eigen::Triplet<double>> triplets;
  sys.rhs = Eigen::VectorXd::Zero(dm.n_free);

  for (int el = 0; el < mesh.n_elements(); ++el) {
    const LocalElement local(mesh, el, p, mode);
    const Eigen::MatrixXd& k_loc = local.stiffness();
    const Eigen::VectorXd f_loc = f ? local.load(f) : Eigen::VectorXd::Zero(local.n_local_dofs());
    const auto& gids = dm.element_dofs[el];
    const int n = local.n_local_dofs();
    for (int i = 0; i < n; ++i) {
      const int gi = gids[i];
      const int fi = dm.free_of_global[gi];
      if (fi < 0) continue;
      sys.rhs[fi] += f_loc[i];
      for (int j = 0; j < n; ++j) {
        const int gj = gids[j];
        const int fj = dm.free_of_global[gj];
        if (fj >= 0)
          triplets.emplace_back(fi, fj, k_loc(i, j));
        else
          sys.rhs[fi] -= k_loc(i, j) * sys.dirichlet_values[gj];
      }
    }
  }

  sys.K.resize(dm.n_free, dm.n_free);
  sys.K.setFromTriplets(triplets.begin(), triplets.end());
  sys.K.makeCompressed();
  return sys;
}

/// Spectral condition number lambda_max / lambda_min of an SPD matrix.
/// Dense solve at desk scale, extremal-eigenvalue iteration beyond.
inline double condition_number(const SparseMat& k, int dense_limit = 6000) {
  const int n = static_cast<int>(k.rows());
  if (n == 0) throw std::invalid_argument("condition_number: empty matrix");
  if (n <= dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(k),
                                                      Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0))
      throw std::runtime_error("condition_number: matrix is not SPD (lambda_min = " +
                               std::to_string(lmin) + ")");
    return lmax / lmin;
  }
  // power iteration for lambda_max, inverse iteration for lambda_min
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double lmax = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = k * v;
    lmax = v.dot(w);
    v = w.normalized();
  }
  Eigen::SimplicialLDLT<SparseMat> chol(k);
  if (chol.info() != Eigen::Success)
    throw std::runtime_error("condition_number: factorization failed, matrix not SPD");
  v = Eigen::VectorXd::Ones(n).normalized();
  double inv_lmin = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = chol.solve(v);
    inv_lmin = v.dot(w);
    v = w.normalized();
  }
  return lmax * inv_lmin;
}

/// Export in coordinate text format (row col value per line, 0-based) with
/// exact decimal values.
inline void export_matrix_coo(const SparseMat& k, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_matrix_coo: cannot open '" + path + "'");
  out << "% coo " << k.rows() << " " << k.cols() << " " << k.nonZeros() << "\n";
  char buf[32];
  for (int c = 0; c < k.outerSize(); ++c)
    for (SparseMat::InnerIterator it(k, c); it; ++it) {
      auto res = std::to_chars(buf, buf + sizeof(buf), it.value());
      out << it.row() << " " << it.col() << " " << std::string_view(buf, res.ptr - buf)
          << "\n";
    }
}

/// Dof interpolant of a smooth function (full dof vector).
inline Eigen::VectorXd interpolate_dofs(const PolyMesh& mesh, int p, const ScalarField& u,
                                        InternalDofMode mode = InternalDofMode::orthonormal) {
  const DofMap dm = build_dof_map(mesh, p);
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(dm.n_total);
  for (int el = 0; el < mesh.n_elements(); ++el) {
    const LocalElement local(mesh, el, p, mode);
    const Eigen::VectorXd loc = local.interpolate(u);
    const auto& gids = dm.element_dofs[el];
    for (std::size_t i = 0; i < gids.size(); ++i) dofs[gids[i]] = loc[i];
  }
  return dofs;
}

}  // namespace pvem
