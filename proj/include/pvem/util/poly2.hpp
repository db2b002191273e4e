// Dense bivariate polynomial in graded-lex coefficient order, for
// manufactured-solution problems.

#pragma once

#include <pvem/quadrature/scaled_monomials.hpp>

#include <vector>

namespace pvem {

class Poly2 {
public:
  explicit Poly2(int degree = 0)
      : degree_(degree), coeff_(poly_space_dim(degree), 0.0) {}

  static Poly2 from_coeffs(int degree, std::vector<double> c) {
    Poly2 p(degree);
    for (std::size_t i = 0; i < c.size() && i < p.coeff_.size(); ++i) p.coeff_[i] = c[i];
    return p;
  }

  int degree() const { return degree_; }

  double& coeff(int ax, int ay) { return coeff_[ScaledMonomials::index_of(ax, ay)]; }
  double coeff(int ax, int ay) const { return coeff_[ScaledMonomials::index_of(ax, ay)]; }

  double operator()(const Vec2& x) const {
    double v = 0.0;
    int idx = 0;
    for (int d = 0; d <= degree_; ++d)
      for (int i = 0; i <= d; ++i, ++idx)
        v += coeff_[idx] * ipow(x.x(), d - i) * ipow(x.y(), i);
    return v;
  }

  Poly2 laplacian() const {
    Poly2 out(std::max(degree_ - 2, 0));
    int idx = 0;
    for (int d = 0; d <= degree_; ++d)
      for (int i = 0; i <= d; ++i, ++idx) {
        const int ax = d - i, ay = i;
        if (ax >= 2) out.coeff(ax - 2, ay) += ax * (ax - 1) * coeff_[idx];
        if (ay >= 2) out.coeff(ax, ay - 2) += ay * (ay - 1) * coeff_[idx];
      }
    return out;
  }

private:
  static double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
  }

  int degree_;
  std::vector<double> coeff_;
};

}  // namespace pvem
