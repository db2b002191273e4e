// Element-local VEM operators for the 2D Poisson problem at degree p: the
// dof matrix of the orthonormal polynomial basis, the energy projector
// (computed from dof data through integration by parts), the L2 projectors
// onto P_{p-2} and -- via the enhancing constraints -- onto P_{p-1}, the
// dof-dof stabilization, the local stiffness matrix, and the local load.
//
// Internal moment dofs are taken against the orthonormal basis by default;
// the monomial mode reproduces the classical (ill-conditioned) choice and
// differs only in the moment-dof functionals.

#pragma once

#include <pvem/quadrature/poly_basis.hpp>
#include <pvem/util/lagrange.hpp>
#include <pvem/vem/dof_map.hpp>

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvem {

enum class InternalDofMode { orthonormal, monomial };

using ScalarField = std::function<double(const Vec2&)>;

class LocalElement {
public:
  LocalElement(const PolyMesh& mesh, int elem, int p,
               InternalDofMode mode = InternalDofMode::orthonormal)
      : p_(p),
        mode_(mode),
        elem_(elem),
        geom_(element_geometry(mesh, elem)),
        quad_(polygon_quadrature(geom_, 2 * p + 2)),
        basis_(orthonormalize(geom_, p, quad_, "element " + std::to_string(elem))) {
    if (p < 1) throw std::invalid_argument("LocalElement: p must be >= 1");
    build();
  }

  int degree() const { return p_; }
  InternalDofMode mode() const { return mode_; }
  const ElementGeometry& geometry() const { return geom_; }
  const PolygonQuad& quadrature() const { return quad_; }
  const PolyBasis& basis() const { return basis_; }

  int n_local_dofs() const { return n_loc_; }
  int n_poly() const { return n_p_; }

  /// D(i,j) = dof_i(m_j).
  const Eigen::MatrixXd& dof_matrix() const { return dof_matrix_; }
  /// Energy projector in polynomial coordinates: dofs -> coefficients in the
  /// orthonormal basis of P_p.
  const Eigen::MatrixXd& pi_nabla_star() const { return pi_nabla_star_; }
  /// Energy projector dof -> dof (= D * pi_nabla_star).
  const Eigen::MatrixXd& pi_nabla() const { return pi_nabla_; }
  /// L2 projector onto P_{p-2}: dofs -> coefficients in the leading block of
  /// the orthonormal basis.
  const Eigen::MatrixXd& pi0_pm2() const { return pi0_pm2_; }
  /// Enhanced L2 projector onto P_{p-1}: moments of order <= p-2 are read off
  /// the dofs, the order-(p-1) coefficients vanish by the enhancing
  /// constraints.
  const Eigen::MatrixXd& pi0_pm1_enhanced() const { return pi0_pm1_enh_; }
  /// Local stiffness: consistency term plus the raw dof-dof stabilization.
  const Eigen::MatrixXd& stiffness() const { return stiffness_; }

  /// Local load vector for the discrete right-hand side: pairs the degree
  /// max(p-2,1) L2 projection of f with the dof-computable part of the test
  /// function (its boundary mean when p = 1).
  Eigen::VectorXd load(const ScalarField& f) const {
    const int d_load = std::max(p_ - 2, 1);
    const int n_load = poly_space_dim(d_load);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_load);
    for (int q = 0; q < quad_.size(); ++q)
      c += quad_.weights[q] * f(quad_.points[q]) *
           (basis_.coeff().topRows(n_load) * basis_.monomials().values(quad_.points[q]));

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_loc_);
    if (p_ >= 2) {
      const Eigen::VectorXd head = c.head(n_pm2_);
      Eigen::VectorXd entries;
      if (mode_ == InternalDofMode::orthonormal)
        entries = geom_.area * head;
      else
        entries = geom_.area *
                  (basis_.coeff().topLeftCorner(n_pm2_, n_pm2_).transpose() * head);
      rhs.segment(moment_offset(), n_pm2_) = entries;
    } else {
      double integral_pi = 0.0;  // int_E of the projection of f
      for (int b = 0; b < n_load; ++b) integral_pi += c[b] * basis_integrals_[b];
      rhs = integral_pi * boundary_mean_row_.transpose();
    }
    return rhs;
  }

  /// Dof vector of a given function (vertex/edge values plus moments).
  Eigen::VectorXd interpolate(const ScalarField& u) const {
    Eigen::VectorXd dofs(n_loc_);
    for (int i = 0; i < n_vertices_; ++i) dofs[i] = u(geom_.vertex[i]);
    for (int e = 0; e < n_vertices_; ++e)
      for (int j = 0; j < p_ - 1; ++j)
        dofs[n_vertices_ + e * (p_ - 1) + j] = u(edge_node(e, j));
    for (int a = 0; a < n_pm2_; ++a) {
      double m = 0.0;
      for (int q = 0; q < quad_.size(); ++q)
        m += quad_.weights[q] * u(quad_.points[q]) * moment_basis_vals_(a, q);
      dofs[moment_offset() + a] = m / geom_.area;
    }
    return dofs;
  }

  int moment_offset() const { return n_vertices_ * p_; }

  /// Coordinates of the j-th internal node of local edge e (traversal order).
  Vec2 edge_node(int e, int j) const {
    const QuadRule1D& gl = gauss_lobatto_1d(p_ + 1);
    const Vec2& a = geom_.vertex[e];
    const Vec2& b = geom_.vertex[(e + 1) % n_vertices_];
    return a + 0.5 * (gl.nodes[j + 1] + 1.0) * (b - a);
  }

private:
  void build() {
    n_vertices_ = static_cast<int>(geom_.vertex.size());
    n_p_ = poly_space_dim(p_);
    n_pm2_ = poly_space_dim(p_ - 2);
    n_loc_ = n_vertices_ * p_ + n_pm2_;
    const int nq = quad_.size();

    // basis values and gradients at the bulk quadrature points
    Eigen::MatrixXd vals(n_p_, nq), gx(n_p_, nq), gy(n_p_, nq);
    for (int q = 0; q < nq; ++q) {
      vals.col(q) = basis_.values(quad_.points[q]);
      const Eigen::MatrixX2d g = basis_.gradients(quad_.points[q]);
      gx.col(q) = g.col(0);
      gy.col(q) = g.col(1);
    }
    Eigen::Map<const Eigen::VectorXd> w(quad_.weights.data(), nq);

    basis_integrals_ = vals * w;

    // values of the moment-dof basis at the bulk quadrature points
    moment_basis_vals_.resize(n_pm2_, nq);
    if (n_pm2_ > 0) {
      if (mode_ == InternalDofMode::orthonormal) {
        moment_basis_vals_ = vals.topRows(n_pm2_);
      } else {
        ScaledMonomials mono(geom_, p_ - 2);
        for (int q = 0; q < nq; ++q)
          moment_basis_vals_.col(q) = mono.values(quad_.points[q]);
      }
    }

    // dof matrix
    dof_matrix_.resize(n_loc_, n_p_);
    for (int i = 0; i < n_vertices_; ++i)
      dof_matrix_.row(i) = basis_.values(geom_.vertex[i]).transpose();
    for (int e = 0; e < n_vertices_; ++e)
      for (int j = 0; j < p_ - 1; ++j)
        dof_matrix_.row(n_vertices_ + e * (p_ - 1) + j) =
            basis_.values(edge_node(e, j)).transpose();
    if (n_pm2_ > 0)
      dof_matrix_.bottomRows(n_pm2_) =
          (moment_basis_vals_ * w.asDiagonal() * vals.transpose()) / geom_.area;

    // edge traversal data shared by the boundary pairing and the p=1 means
    const QuadRule1D& trace = gauss_lobatto_1d(p_ + 1);
    const QuadRule1D& erule = gauss_legendre_1d(p_ + 1);
    const Eigen::MatrixXd lag = lagrange_eval_matrix(trace.nodes, erule.nodes);

    // b_j(v) = a^E(v, m_j) = int_dE v dm_j/dn - int_E v lap(m_j)
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_p_, n_loc_);
    boundary_mean_row_ = Eigen::RowVectorXd::Zero(n_loc_);
    double perimeter = 0.0;
    for (int e = 0; e < n_vertices_; ++e) {
      const Vec2& pa = geom_.vertex[e];
      const Vec2& pb = geom_.vertex[(e + 1) % n_vertices_];
      const Vec2& nrm = geom_.edge_normal[e];
      const double half_len = 0.5 * geom_.edge_length[e];
      perimeter += geom_.edge_length[e];
      std::vector<int> trace_ids(p_ + 1);
      trace_ids[0] = e;
      for (int j = 0; j < p_ - 1; ++j) trace_ids[j + 1] = n_vertices_ + e * (p_ - 1) + j;
      trace_ids[p_] = (e + 1) % n_vertices_;
      for (int q = 0; q < erule.size(); ++q) {
        const Vec2 x = pa + 0.5 * (erule.nodes[q] + 1.0) * (pb - pa);
        const double wq = erule.weights[q] * half_len;
        const Eigen::VectorXd dn = basis_.gradients(x) * nrm;
        for (int i = 0; i <= p_; ++i) {
          b.col(trace_ids[i]) += wq * lag(q, i) * dn;
          boundary_mean_row_[trace_ids[i]] += wq * lag(q, i);
        }
      }
    }
    boundary_mean_row_ /= perimeter;

    if (n_pm2_ > 0) {
      // lap(m_j) expanded over the moment-dof basis: int_E v lap(m_j) is then
      // a combination of moment dofs scaled by |E|
      const Eigen::MatrixXd lap_q =
          basis_.monomials().laplacian_map() * basis_.coeff().transpose();  // q-coeffs per m_j
      Eigen::MatrixXd lap_coeff;  // coefficients over the moment-dof basis
      if (mode_ == InternalDofMode::orthonormal) {
        const Eigen::MatrixXd c_pm2_t =
            basis_.coeff().topLeftCorner(n_pm2_, n_pm2_).transpose();
        lap_coeff = c_pm2_t.triangularView<Eigen::Upper>().solve(lap_q);
      } else {
        lap_coeff = lap_q;
      }
      b.block(0, moment_offset(), n_p_, n_pm2_) -= geom_.area * lap_coeff.transpose();
    }

    // stiffness Gram matrix of the polynomial basis
    Eigen::MatrixXd g_stiff =
        gx * w.asDiagonal() * gx.transpose() + gy * w.asDiagonal() * gy.transpose();

    // fix the constant part: mean over E for p >= 2, mean over dE for p = 1
    Eigen::MatrixXd g_sys = g_stiff;
    if (p_ >= 2) {
      g_sys.row(0) = (vals * w).transpose() / geom_.area;
      b.row(0).setZero();
      const double c00 = basis_.coeff()(0, 0);
      b(0, moment_offset()) = mode_ == InternalDofMode::orthonormal ? 1.0 / c00 : 1.0;
    } else {
      Eigen::RowVectorXd mean_row = Eigen::RowVectorXd::Zero(n_p_);
      for (int e = 0; e < n_vertices_; ++e) {
        const Vec2& pa = geom_.vertex[e];
        const Vec2& pb = geom_.vertex[(e + 1) % n_vertices_];
        const double half_len = 0.5 * geom_.edge_length[e];
        for (int q = 0; q < erule.size(); ++q) {
          const Vec2 x = pa + 0.5 * (erule.nodes[q] + 1.0) * (pb - pa);
          mean_row += erule.weights[q] * half_len * basis_.values(x).transpose();
        }
      }
      g_sys.row(0) = mean_row / perimeter;
      b.row(0) = boundary_mean_row_;
    }

    pi_nabla_star_ = g_sys.partialPivLu().solve(b);
    if (!pi_nabla_star_.allFinite())
      throw std::runtime_error("LocalElement: singular projector system on element " +
                               std::to_string(elem_));
    pi_nabla_ = dof_matrix_ * pi_nabla_star_;

    const Eigen::MatrixXd residual =
        Eigen::MatrixXd::Identity(n_loc_, n_loc_) - pi_nabla_;
    stiffness_ = pi_nabla_star_.transpose() * g_stiff * pi_nabla_star_ +
                 residual.transpose() * residual;

    // L2 projectors from the moment dofs
    pi0_pm2_ = Eigen::MatrixXd::Zero(n_pm2_, n_loc_);
    if (n_pm2_ > 0) {
      if (mode_ == InternalDofMode::orthonormal)
        pi0_pm2_.block(0, moment_offset(), n_pm2_, n_pm2_) =
            geom_.area * Eigen::MatrixXd::Identity(n_pm2_, n_pm2_);
      else
        pi0_pm2_.block(0, moment_offset(), n_pm2_, n_pm2_) =
            geom_.area * basis_.coeff().topLeftCorner(n_pm2_, n_pm2_);
    }
    pi0_pm1_enh_ = Eigen::MatrixXd::Zero(poly_space_dim(p_ - 1), n_loc_);
    pi0_pm1_enh_.topRows(n_pm2_) = pi0_pm2_;
  }

  int p_;
  InternalDofMode mode_;
  int elem_;
  ElementGeometry geom_;
  PolygonQuad quad_;
  PolyBasis basis_;

  int n_vertices_ = 0, n_p_ = 0, n_pm2_ = 0, n_loc_ = 0;
  Eigen::MatrixXd dof_matrix_;
  Eigen::MatrixXd pi_nabla_star_, pi_nabla_;
  Eigen::MatrixXd pi0_pm2_, pi0_pm1_enh_;
  Eigen::MatrixXd stiffness_;
  Eigen::MatrixXd moment_basis_vals_;
  Eigen::RowVectorXd boundary_mean_row_;
  Eigen::VectorXd basis_integrals_;
};

}  // namespace pvem
