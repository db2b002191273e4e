// 1D Gauss-Legendre and Gauss-Lobatto rules on [-1,1], computed by Newton
// iteration on the Legendre recurrence and cached per point count.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace pvem {

/// Quadrature rule on the reference interval [-1,1].
struct QuadRule1D {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

/// Legendre P_n(x) and its derivative by the three-term recurrence.
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

inline QuadRule1D compute_gauss_legendre(int n) {
  QuadRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
    const auto [p, dp] = legendre(n, 0.0);
    (void)p;
    rule.weights[n / 2] = 2.0 / (dp * dp);
  }
  return rule;
}

inline QuadRule1D compute_gauss_lobatto(int n) {
  QuadRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.nodes[0] = -1.0;
  rule.nodes[n - 1] = 1.0;
  const int m = n - 1;  // interior nodes are the roots of P'_m
  for (int i = 1; i <= (n - 1) / 2; ++i) {
    double x = std::cos(M_PI * i / m);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(m, x);
      // f = P'_m, f' = P''_m from the Legendre ODE
      const double ddp = (2.0 * x * dp - m * (m + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / ddp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.nodes[n - 1 - i] = -x;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto [p, dp] = legendre(m, rule.nodes[i]);
    (void)dp;
    rule.weights[i] = 2.0 / (m * (m + 1.0) * p * p);
  }
  return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre rule, exact on P_{2n-1}.
inline const QuadRule1D& gauss_legendre_1d(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_1d: n must be >= 1");
  static std::map<int, QuadRule1D> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

/// n-point Gauss-Lobatto rule (endpoints included), exact on P_{2n-3}.
inline const QuadRule1D& gauss_lobatto_1d(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_1d: n must be >= 2");
  static std::map<int, QuadRule1D> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_lobatto(n)).first;
  return it->second;
}

}  // namespace pvem
