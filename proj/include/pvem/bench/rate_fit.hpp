// Least-squares growth-rate fits on log-transformed data.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pvem {

/// Fitted growth model: algebraic y = C x^s (parameters c0 = C, c1 = s) or
/// exponential y = a exp(b x) (c0 = a, c1 = b), with the R^2 of the
/// log-space fit.
struct RateFit {
  enum class Model { algebraic, exponential };
  Model model = Model::algebraic;
  double c0 = 0.0;
  double c1 = 0.0;
  double r2 = 0.0;
};

namespace detail {

inline RateFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys,
                        RateFit::Model model) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("rate fit: need at least two samples");
  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.model = model;
  fit.c1 = sxy / sxx;
  fit.c0 = std::exp(my - fit.c1 * mx);
  double ss_res = 0;
  for (int i = 0; i < n; ++i) {
    const double pred = (my - fit.c1 * mx) + fit.c1 * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
  }
  fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace detail

/// Fit y = C x^s by least squares on (ln x, ln y).
inline RateFit fit_algebraic(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0)
      throw std::invalid_argument("fit_algebraic: samples must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return detail::fit_line(lx, ly, RateFit::Model::algebraic);
}

/// Fit y = a exp(b x) by least squares on (x, ln y).
inline RateFit fit_exponential(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] <= 0) throw std::invalid_argument("fit_exponential: samples must be positive");
    ly[i] = std::log(y[i]);
  }
  return detail::fit_line(x, ly, RateFit::Model::exponential);
}

}  // namespace pvem
