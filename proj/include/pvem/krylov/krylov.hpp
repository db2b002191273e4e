// Conjugate gradients, preconditioned CG, and a zero-fill incomplete
// Cholesky preconditioner. The multigrid preconditioner runs one cycle from a
// zero initial guess, which makes it a fixed linear operator per solve;
// convergence is always measured on the true (unpreconditioned) residual.

#pragma once

#include <pvem/multigrid/multigrid.hpp>

#include <Eigen/Sparse>

#include <functional>
#include <string>
#include <vector>

namespace pvem {

struct Preconditioner {
  std::string kind = "none";
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;  ///< z = M^{-1} r
};

inline Preconditioner identity_preconditioner() {
  return {"none", [](const Eigen::VectorXd& r) { return r; }};
}

/// One multigrid cycle MG(p, r, 0, m) as preconditioner. The hierarchy must
/// outlive the returned object.
inline Preconditioner mg_preconditioner(const Hierarchy& h, int m) {
  const std::string kind =
      h.smoother == SmootherKind::richardson ? "mg(richardson)" : "mg(gs)";
  return {kind, [&h, m](const Eigen::VectorXd& r) {
            if (h.n_levels() == 1) return Eigen::VectorXd(h.levels[0].direct->solve(r));
            return mg_cycle(h, h.n_levels() - 1, r, Eigen::VectorXd::Zero(r.size()), m);
          }};
}

/// Zero-fill incomplete Cholesky factor (lower triangular, K's lower pattern).
struct Ic0Factor {
  SparseMat L;
  int retries = 0;      ///< diagonal-shift attempts before success
  double shift = 0.0;   ///< shift added to the diagonal on the last attempt
};

namespace detail {

/// One IC(0) attempt on K + shift*I; empty L on pivot failure.
inline bool ic0_attempt(const SparseMat& k, double shift, SparseMat& l_out) {
  const int n = static_cast<int>(k.rows());
  // rows of L built so far, each sorted by column
  std::vector<std::vector<std::pair<int, double>>> rows(n);
  std::vector<Eigen::Triplet<double>> trips;

  for (int j = 0; j < n; ++j) {
    double diag = shift;
    std::vector<std::pair<int, double>> below;  // (i, K(i,j)) with i > j
    for (SparseMat::InnerIterator it(k, j); it; ++it) {
      if (it.row() == j) diag += it.value();
      if (it.row() > j) below.emplace_back(static_cast<int>(it.row()), it.value());
    }
    for (const auto& [col, val] : rows[j]) diag -= val * val;
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    trips.emplace_back(j, j, ljj);
    rows[j].emplace_back(j, ljj);
    for (const auto& [i, aij] : below) {
      double s = aij;
      // intersection of rows i and j over columns < j
      auto pi = rows[i].begin();
      auto pj = rows[j].begin();
      while (pi != rows[i].end() && pj != rows[j].end() && pj->first < j) {
        if (pi->first == pj->first) {
          s -= pi->second * pj->second;
          ++pi;
          ++pj;
        } else if (pi->first < pj->first) {
          ++pi;
        } else {
          ++pj;
        }
      }
      const double lij = s / ljj;
      trips.emplace_back(i, j, lij);
      rows[i].emplace_back(j, lij);
    }
  }
  l_out.resize(n, n);
  l_out.setFromTriplets(trips.begin(), trips.end());
  l_out.makeCompressed();
  return true;
}

}  // namespace detail

/// IC(0) with diagonal-shift retry: on a negative pivot the shift starts at
/// 1e-3 * max diagonal and doubles until the factorization succeeds.
inline Ic0Factor ic0(const SparseMat& k) {
  Ic0Factor f;
  if (detail::ic0_attempt(k, 0.0, f.L)) return f;
  double max_diag = 0.0;
  for (int j = 0; j < k.outerSize(); ++j)
    for (SparseMat::InnerIterator it(k, j); it; ++it)
      if (it.row() == j) max_diag = std::max(max_diag, std::abs(it.value()));
  double shift = 1e-3 * max_diag;
  for (int attempt = 1; attempt <= 60; ++attempt, shift *= 2.0) {
    if (detail::ic0_attempt(k, shift, f.L)) {
      f.retries = attempt;
      f.shift = shift;
      return f;
    }
  }
  throw std::runtime_error("ic0: factorization failed even with diagonal shifts");
}

inline Preconditioner ic0_preconditioner(const SparseMat& k) {
  auto factor = std::make_shared<Ic0Factor>(ic0(k));
  return {"ic0", [factor](const Eigen::VectorXd& r) {
            const Eigen::VectorXd y = factor->L.triangularView<Eigen::Lower>().solve(r);
            return Eigen::VectorXd(
                factor->L.transpose().triangularView<Eigen::Upper>().solve(y));
          }};
}

/// Plain conjugate gradients; throws on breakdown (p'Kp <= 0, non-SPD input).
inline SolveReport cg(const SparseMat& k, const Eigen::VectorXd& f, double tol = 1e-6,
                      int maxit = 1000) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(f.size());
  Eigen::VectorXd r = f;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const double fnorm = f.norm();
  rep.residuals.push_back(std::sqrt(rr));

  while (std::sqrt(rr) > tol * fnorm && rep.iterations < maxit) {
    const Eigen::VectorXd kp = k * p;
    const double pkp = p.dot(kp);
    if (!(pkp > 0.0))
      throw std::runtime_error("cg: breakdown, p'Kp = " + std::to_string(pkp) +
                               " <= 0 (matrix not SPD)");
    const double alpha = rr / pkp;
    x += alpha * p;
    r -= alpha * kp;
    const double rr_new = r.squaredNorm();
    rep.residuals.push_back(std::sqrt(rr_new));
    ++rep.iterations;
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  rep.converged = std::sqrt(rr) <= tol * fnorm;
  if (rep.iterations >= 1 && rep.residuals.front() > 0.0)
    rep.rho = convergence_factor(rep.residuals);
  rep.solution = std::move(x);
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Preconditioned CG; convergence is checked on the true residual.
///
/// With the post-smoothing-only W-cycle the preconditioner is nonsymmetric
/// and plain PCG can stagnate. `flexible` switches to truncated flexible CG:
/// each preconditioned residual is K-orthogonalized against the last two
/// search directions, which restores convergence whenever the preconditioned
/// operator has positive real spectrum. Breakdown is flagged in the report
/// rather than thrown.
inline SolveReport pcg(const SparseMat& k, const Eigen::VectorXd& f,
                       const Preconditioner& m, double tol = 1e-6, int maxit = 1000,
                       bool flexible = false) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  const int n = static_cast<int>(f.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = f;
  const double fnorm = f.norm();
  double rnorm = r.norm();
  rep.residuals.push_back(rnorm);

  auto breakdown = [&](const std::string& what) {
    rep.note = what +
               "; for a nonsymmetric multigrid preconditioner consider the "
               "flexible orthogonalization option";
    rep.converged = false;
  };

  if (flexible) {
    // FCG(2): directions kept K-orthogonal to a short history
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> hist;  // (p, Kp)
    while (rnorm > tol * fnorm && rep.iterations < maxit) {
      Eigen::VectorXd p = m.apply(r);
      for (const auto& [pj, kpj] : hist) p -= (kpj.dot(p) / kpj.dot(pj)) * pj;
      Eigen::VectorXd kp = k * p;
      const double pkp = p.dot(kp);
      if (!(pkp > 0.0)) {
        breakdown("pcg breakdown: p'Kp <= 0");
        break;
      }
      const double alpha = r.dot(p) / pkp;
      x += alpha * p;
      r -= alpha * kp;
      rnorm = r.norm();
      rep.residuals.push_back(rnorm);
      ++rep.iterations;
      hist.emplace_back(std::move(p), std::move(kp));
      if (hist.size() > 2) hist.erase(hist.begin());
    }
  } else {
    Eigen::VectorXd z = m.apply(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    while (rnorm > tol * fnorm && rep.iterations < maxit) {
      const Eigen::VectorXd kp = k * p;
      const double pkp = p.dot(kp);
      if (!(pkp > 0.0)) {
        breakdown("pcg breakdown: p'Kp <= 0");
        break;
      }
      const double alpha = rz / pkp;
      x += alpha * p;
      r -= alpha * kp;
      rnorm = r.norm();
      rep.residuals.push_back(rnorm);
      ++rep.iterations;
      if (rnorm <= tol * fnorm) break;
      const Eigen::VectorXd z_new = m.apply(r);
      const double rz_new = r.dot(z_new);
      if (rz_new == 0.0) {
        breakdown("pcg breakdown: r'z = 0");
        break;
      }
      p = z_new + (rz_new / rz) * p;
      rz = rz_new;
    }
  }
  if (rep.note.empty()) rep.converged = rnorm <= tol * fnorm;
  if (rep.iterations >= 1 && rep.residuals.front() > 0.0)
    rep.rho = convergence_factor(rep.residuals);
  rep.solution = std::move(x);
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace pvem
