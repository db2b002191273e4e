// L2(E)-orthonormal polynomial basis on an element, obtained from the scaled
// monomials by Cholesky factorization of the quadrature Gram matrix. The
// coefficient matrix is lower triangular in graded-lex order, so the leading
// block of a degree-l basis is the basis of every lower degree.

#pragma once

#include <pvem/quadrature/polygon_quad.hpp>
#include <pvem/quadrature/scaled_monomials.hpp>

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pvem {

namespace detail {

/// Unblocked lower Cholesky. The factor of a leading principal block never
/// depends on trailing entries, which keeps bases of different degrees on the
/// same element consistent with each other.
inline Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a, const std::string& what) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0))
      throw std::runtime_error(what + ": Gram matrix not positive definite at row " +
                               std::to_string(j) + " (degenerate element)");
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

}  // namespace detail

/// Lower-triangular T such that the row family T*vals is orthonormal under
/// the discrete product diag(w). For an already-orthonormal family T = I up
/// to roundoff.
inline Eigen::MatrixXd orthonormalize_rows(const Eigen::MatrixXd& vals,
                                           const Eigen::VectorXd& w,
                                           const std::string& what = "orthonormalize") {
  const int n = static_cast<int>(vals.rows());
  Eigen::MatrixXd gram = vals * w.asDiagonal() * vals.transpose();
  Eigen::MatrixXd l = detail::cholesky_lower(gram, what);
  return l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
}

/// Orthonormal polynomial basis m_i = sum_j C(i,j) q_j on one element.
class PolyBasis {
public:
  PolyBasis(const ElementGeometry& geom, int degree, Eigen::MatrixXd coeff)
      : monomials_(geom, degree), coeff_(std::move(coeff)) {}

  int degree() const { return monomials_.degree(); }
  int dim() const { return monomials_.dim(); }
  const ScaledMonomials& monomials() const { return monomials_; }

  /// Coefficient matrix: row i gives m_i in the scaled-monomial basis.
  const Eigen::MatrixXd& coeff() const { return coeff_; }

  Eigen::VectorXd values(const Vec2& x) const { return coeff_ * monomials_.values(x); }
  Eigen::MatrixX2d gradients(const Vec2& x) const { return coeff_ * monomials_.gradients(x); }

  /// Values of the first `count` basis functions at all quadrature points,
  /// one row per function.
  Eigen::MatrixXd values_at(const PolygonQuad& quad, int count) const {
    Eigen::MatrixXd v(count, quad.size());
    for (int q = 0; q < quad.size(); ++q)
      v.col(q) = coeff_.topRows(count) * monomials_.values(quad.points[q]);
    return v;
  }

private:
  ScaledMonomials monomials_;
  Eigen::MatrixXd coeff_;
};

/// Orthonormalize the scaled monomials of degree <= l against the L2(E)
/// product realized by `quad` (which must be exact on P_{2l}). A second
/// Cholesky pass tightens the result on badly shaped elements where a single
/// factorization of the monomial Gram matrix loses digits.
inline PolyBasis orthonormalize(const ElementGeometry& geom, int l, const PolygonQuad& quad,
                                const std::string& element_name = "element") {
  ScaledMonomials mono(geom, l);
  const int n = mono.dim();
  Eigen::MatrixXd vals(n, quad.size());
  for (int q = 0; q < quad.size(); ++q) vals.col(q) = mono.values(quad.points[q]);
  Eigen::Map<const Eigen::VectorXd> w(quad.weights.data(), quad.size());

  const std::string what = "orthonormalize(" + element_name + ")";
  Eigen::MatrixXd c = orthonormalize_rows(vals, w, what);
  c = orthonormalize_rows(c * vals, w, what) * c;

  return PolyBasis(geom, l, std::move(c));
}

}  // namespace pvem
