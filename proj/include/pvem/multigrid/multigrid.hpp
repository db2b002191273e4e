// W-cycle p-multigrid on a fixed mesh: the level at degree l carries the VEM
// matrix re-assembled at that degree (never a Galerkin triple product), dof
// transfer to the level above, and smoother data. The cycle runs the coarse
// grid correction first (two recursive calls) and post-smooths m times; the
// coarsest level is solved directly.

#pragma once

#include <pvem/transfer/transfer.hpp>
#include <pvem/vem/assembly.hpp>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace pvem {

enum class SmootherKind { richardson, sym_gauss_seidel };

/// Outcome of an iterative solve: residual history, status, and the
/// geometric-mean residual reduction rho = exp((1/N) ln(r_N / r_0)).
struct SolveReport {
  int iterations = 0;
  std::vector<double> residuals;  ///< Euclidean norms r_0 .. r_N
  bool converged = false;
  bool diverged = false;
  double rho = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = 0.0;
  Eigen::VectorXd solution;
  std::string note;  ///< breakdown and divergence details
};

/// rho = exp((1/N) ln(r_N / r_0)).
inline double convergence_factor(const std::vector<double>& residuals) {
  if (residuals.size() < 2)
    throw std::invalid_argument("convergence_factor: need at least one iteration");
  const double r0 = residuals.front();
  const double rn = residuals.back();
  if (r0 <= 0.0) throw std::invalid_argument("convergence_factor: r_0 must be positive");
  const double n = static_cast<double>(residuals.size() - 1);
  return std::exp(std::log(rn / r0) / n);
}

/// Rayleigh-quotient estimate of lambda_max after `iters` power iterations
/// from a seeded random start.
inline double estimate_lambda(const SparseMat& k, int iters = 10,
                              std::uint64_t seed = 1234) {
  const int n = static_cast<int>(k.rows());
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = 2.0 * detail::canonical_double(rng) - 1.0;
  } while (v.norm() == 0.0);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd w = k * v;
    lambda = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
  }
  return lambda;
}

struct Level {
  int degree = 1;
  DofMap dofs;
  SparseMat K;                 ///< free x free VEM matrix assembled at `degree`
  double lambda_tilde = 0.0;   ///< Richardson parameter (safety factor applied)
  TransferPair from_coarser;   ///< transfer from the level below (absent on coarsest)
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMat>> direct;  ///< coarsest only
};

struct Hierarchy {
  std::vector<Level> levels;  ///< coarsest first
  SmootherKind smoother = SmootherKind::richardson;
  Eigen::VectorXd rhs_fine;   ///< load vector at the finest level

  int n_levels() const { return static_cast<int>(levels.size()); }
  const Level& finest() const { return levels.back(); }
};

/// Assemble the degree range [p - n_levels + 1, p] on `mesh`. Every level is
/// its own VEM assembly; lambda_safety scales the Richardson parameter
/// (default 1: the raw 10-iteration power-method estimate).
inline Hierarchy build_hierarchy(const PolyMesh& mesh, int p, int n_levels,
                                 SmootherKind smoother = SmootherKind::richardson,
                                 const ScalarField& f = {},
                                 InternalDofMode mode = InternalDofMode::orthonormal,
                                 double lambda_safety = 1.0,
                                 std::uint64_t lambda_seed = 1234) {
  if (n_levels < 1 || n_levels > p)
    throw std::invalid_argument("build_hierarchy: need 1 <= n_levels <= p");
  Hierarchy h;
  h.smoother = smoother;
  const int degree_lo = p - n_levels + 1;
  for (int degree = degree_lo; degree <= p; ++degree) {
    Level lvl;
    lvl.degree = degree;
    GlobalSystem sys = assemble_global(mesh, degree, degree == p ? f : ScalarField{}, mode);
    lvl.dofs = std::move(sys.dofs);
    lvl.K = std::move(sys.K);
    if (degree == p) h.rhs_fine = std::move(sys.rhs);
    if (degree == degree_lo) {
      lvl.direct = std::make_shared<Eigen::SimplicialLDLT<SparseMat>>(lvl.K);
      if (lvl.direct->info() != Eigen::Success)
        throw std::runtime_error("build_hierarchy: coarsest factorization failed");
    } else {
      lvl.from_coarser = build_prolongation(h.levels.back().dofs, lvl.dofs, mesh);
      lvl.lambda_tilde = lambda_safety * estimate_lambda(lvl.K, 10, lambda_seed);
    }
    h.levels.push_back(std::move(lvl));
  }
  // the coarsest level still needs smoother data when it is the only level
  if (h.n_levels() == 1 && h.levels[0].lambda_tilde == 0.0)
    h.levels[0].lambda_tilde = lambda_safety * estimate_lambda(h.levels[0].K, 10, lambda_seed);
  return h;
}

/// One post-smoothing step; `step` counts from 1 within a cycle so the
/// symmetrized Gauss-Seidel alternates forward (odd) and backward (even)
/// sweeps.
inline void smooth_step(SmootherKind kind, const Level& lvl, const Eigen::VectorXd& g,
                        Eigen::VectorXd& z, int step) {
  const Eigen::VectorXd r = g - lvl.K * z;
  if (kind == SmootherKind::richardson) {
    z += r / lvl.lambda_tilde;
  } else if (step % 2 == 1) {
    z += lvl.K.triangularView<Eigen::Lower>().solve(r);
  } else {
    z += lvl.K.triangularView<Eigen::Upper>().solve(r);
  }
}

/// Apply m smoothing steps to K z = g starting from z.
inline Eigen::VectorXd smooth(SmootherKind kind, const Level& lvl, const Eigen::VectorXd& g,
                              Eigen::VectorXd z, int m) {
  for (int i = 1; i <= m; ++i) smooth_step(kind, lvl, g, z, i);
  return z;
}

/// One W-cycle iteration at `level` (0 = coarsest, solved directly).
inline Eigen::VectorXd mg_cycle(const Hierarchy& h, int level, const Eigen::VectorXd& g,
                                const Eigen::VectorXd& z0, int m) {
  if (level == 0) return h.levels[0].direct->solve(g);
  const Level& lvl = h.levels[level];

  // coarse grid correction: restrict the residual, solve the residual
  // equation twice recursively, prolongate
  const Eigen::VectorXd r_coarse = lvl.from_coarser.restrict_free(g - lvl.K * z0);
  const Eigen::VectorXd e_bar =
      mg_cycle(h, level - 1, r_coarse, Eigen::VectorXd::Zero(r_coarse.size()), m);
  const Eigen::VectorXd e = mg_cycle(h, level - 1, r_coarse, e_bar, m);
  Eigen::VectorXd z = z0 + lvl.from_coarser.P_free * e;

  // post-smoothing
  for (int i = 1; i <= m; ++i) smooth_step(h.smoother, lvl, g, z, i);
  return z;
}

/// Full multigrid iteration on the finest system K z = f until
/// ||r|| <= tol ||f|| or maxit; aborts when the residual grows 1e6-fold.
inline SolveReport mg_solve(const Hierarchy& h, const Eigen::VectorXd& f,
                            Eigen::VectorXd z, int m, double tol = 1e-8,
                            int maxit = 1000) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport report;
  const Level& fine = h.finest();
  const double fnorm = f.norm();
  double rnorm = (f - fine.K * z).norm();
  report.residuals.push_back(rnorm);
  const double r0 = rnorm;

  while (rnorm > tol * fnorm && report.iterations < maxit) {
    if (h.n_levels() == 1)
      z = h.levels[0].direct->solve(f);
    else
      z = mg_cycle(h, h.n_levels() - 1, f, z, m);
    rnorm = (f - fine.K * z).norm();
    report.residuals.push_back(rnorm);
    ++report.iterations;
    if (rnorm > 1e6 * std::max(r0, tol * fnorm)) {
      report.diverged = true;
      break;
    }
  }
  report.converged = !report.diverged && rnorm <= tol * fnorm;
  if (report.diverged) report.note = "diverged";
  if (report.iterations >= 1 && r0 > 0.0) report.rho = convergence_factor(report.residuals);
  report.solution = std::move(z);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

/// Smallest m for which mg_solve converges; 0 for a single-level hierarchy
/// (direct solve), nullopt when no m <= m_max works.
inline std::optional<int> min_smoothing_steps(const Hierarchy& h, const Eigen::VectorXd& f,
                                              int m_max = 64, double tol = 1e-8,
                                              int maxit = 1000) {
  if (h.n_levels() == 1) return 0;
  for (int m = 1; m <= m_max; ++m) {
    const SolveReport rep =
        mg_solve(h, f, Eigen::VectorXd::Zero(f.size()), m, tol, maxit);
    if (rep.converged) return m;
  }
  return std::nullopt;
}

}  // namespace pvem
