// Scaled monomials q_a(x) = ((x - x_E)/h_E)^a on an element, enumerated in
// graded lexicographic order: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...

#pragma once

#include <pvem/geometry/mesh.hpp>

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace pvem {

/// dim P_l in two variables.
constexpr int poly_space_dim(int l) { return l < 0 ? 0 : (l + 1) * (l + 2) / 2; }

/// Exponent pairs (a_x, a_y) for all |a| <= l in graded-lex order.
inline std::vector<std::array<int, 2>> monomial_exponents(int l) {
  std::vector<std::array<int, 2>> exps;
  exps.reserve(poly_space_dim(l));
  for (int d = 0; d <= l; ++d)
    for (int i = 0; i <= d; ++i) exps.push_back({d - i, i});
  return exps;
}

/// Evaluator for the scaled monomials of degree <= l on one element.
class ScaledMonomials {
public:
  ScaledMonomials(const ElementGeometry& geom, int l)
      : center_(geom.centroid), h_(geom.diameter), degree_(l), exps_(monomial_exponents(l)) {}

  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(exps_.size()); }
  const std::vector<std::array<int, 2>>& exponents() const { return exps_; }
  double h() const { return h_; }
  const Vec2& center() const { return center_; }

  /// Values of all monomials at x (column vector of length dim()).
  Eigen::VectorXd values(const Vec2& x) const {
    const double sx = (x.x() - center_.x()) / h_;
    const double sy = (x.y() - center_.y()) / h_;
    Eigen::VectorXd v(dim());
    for (int i = 0; i < dim(); ++i)
      v[i] = ipow(sx, exps_[i][0]) * ipow(sy, exps_[i][1]);
    return v;
  }

  /// Gradients of all monomials at x, one row (d/dx, d/dy) per monomial.
  Eigen::MatrixX2d gradients(const Vec2& x) const {
    const double sx = (x.x() - center_.x()) / h_;
    const double sy = (x.y() - center_.y()) / h_;
    Eigen::MatrixX2d g(dim(), 2);
    for (int i = 0; i < dim(); ++i) {
      const int ax = exps_[i][0], ay = exps_[i][1];
      g(i, 0) = ax == 0 ? 0.0 : ax * ipow(sx, ax - 1) * ipow(sy, ay) / h_;
      g(i, 1) = ay == 0 ? 0.0 : ay * ipow(sx, ax) * ipow(sy, ay - 1) / h_;
    }
    return g;
  }

  /// Coefficients of the Laplacian of each monomial in the monomial basis of
  /// degree l-2: column j holds the expansion of laplacian(q_j).
  Eigen::MatrixXd laplacian_map() const {
    const int nd = poly_space_dim(degree_ - 2);
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(nd, dim());
    const double inv_h2 = 1.0 / (h_ * h_);
    for (int j = 0; j < dim(); ++j) {
      const int ax = exps_[j][0], ay = exps_[j][1];
      if (ax >= 2) lap(index_of(ax - 2, ay), j) += ax * (ax - 1) * inv_h2;
      if (ay >= 2) lap(index_of(ax, ay - 2), j) += ay * (ay - 1) * inv_h2;
    }
    return lap;
  }

  /// Position of exponent pair (ax, ay) in graded-lex order.
  static int index_of(int ax, int ay) {
    const int d = ax + ay;
    return d * (d + 1) / 2 + ay;
  }

private:
  static double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
  }

  Vec2 center_;
  double h_;
  int degree_;
  std::vector<std::array<int, 2>> exps_;
};

}  // namespace pvem
