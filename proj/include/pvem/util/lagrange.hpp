// Barycentric Lagrange evaluation on a fixed node set.

#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace pvem {

/// Matrix L with L(q, i) = l_i(pts[q]), where {l_i} is the Lagrange basis of
/// `nodes`. Evaluation points coinciding with a node are handled exactly.
inline Eigen::MatrixXd lagrange_eval_matrix(const Eigen::VectorXd& nodes,
                                            const Eigen::VectorXd& pts) {
  const int n = static_cast<int>(nodes.size());
  const int m = static_cast<int>(pts.size());
  Eigen::VectorXd bary(n);
  for (int i = 0; i < n; ++i) {
    double w = 1.0;
    for (int k = 0; k < n; ++k)
      if (k != i) w *= nodes[i] - nodes[k];
    bary[i] = 1.0 / w;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, n);
  for (int q = 0; q < m; ++q) {
    int hit = -1;
    for (int i = 0; i < n; ++i)
      if (pts[q] == nodes[i]) {
        hit = i;
        break;
      }
    if (hit >= 0) {
      out(q, hit) = 1.0;
      continue;
    }
    double denom = 0.0;
    for (int i = 0; i < n; ++i) denom += bary[i] / (pts[q] - nodes[i]);
    for (int i = 0; i < n; ++i) out(q, i) = bary[i] / (pts[q] - nodes[i]) / denom;
  }
  return out;
}

}  // namespace pvem
