// Configuration-driven experiment runners: condition-number study with rate
// fits, convergence-factor sweeps, minimum-smoothing-step tables, spectral
// growth of the largest eigenvalue, PCG comparisons, and patch tests. Every
// runner returns its CSV as a string; identical config and seed give
// byte-identical output.

#pragma once

#include <pvem/bench/rate_fit.hpp>
#include <pvem/geometry/generators.hpp>
#include <pvem/krylov/krylov.hpp>
#include <pvem/multigrid/multigrid.hpp>
#include <pvem/util/poly2.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace pvem {

struct ExperimentConfig {
  std::string mesh = "square";  ///< square | voronoi | hex
  int n = 4;                    ///< square: n x n cells; voronoi: n^2 seeds; hex: ~n cells per row
  int lloyd_iters = 100;
  std::uint64_t seed = 1;
  int p_min = 2;
  int p_max = 6;
  int levels = 0;  ///< 0 = sweep all admissible K in 2..p, else this K only
  std::string smoother = "richardson";  ///< richardson | gs
  std::vector<int> m_list = {2, 4, 6, 8};
  int m = 8;          ///< post-smoothing steps for the PCG preconditioner
  double tol = 1e-8;  ///< multigrid relative residual tolerance
  double pcg_tol = 1e-6;
  int maxit = 1000;
  int m_max = 64;          ///< scan cap for the minimum smoothing search
  bool strict_pcg = false; ///< textbook PCG updates for the MG preconditioner
  double lambda_safety = 1.0;
  std::string out;  ///< CSV path; empty writes nowhere (caller prints)

  void validate() const {
    if (mesh != "square" && mesh != "voronoi" && mesh != "hex")
      throw std::invalid_argument("config: mesh must be square, voronoi or hex");
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (p_min < 1 || p_max > 8 || p_min > p_max)
      throw std::invalid_argument("config: degree range must satisfy 1 <= p_min <= p_max <= 8");
    if (levels < 0 || (levels > 0 && levels > p_max))
      throw std::invalid_argument("config: levels must be <= finest degree");
    if (smoother != "richardson" && smoother != "gs")
      throw std::invalid_argument("config: smoother must be richardson or gs");
  }
};

inline PolyMesh make_mesh(const std::string& family, int n, int lloyd_iters,
                          std::uint64_t seed) {
  if (family == "square") return generate_square_mesh(n);
  if (family == "voronoi") return generate_voronoi_lloyd_mesh(n * n, lloyd_iters, seed);
  if (family == "hex") return generate_hexagonal_mesh(n);
  throw std::invalid_argument("make_mesh: unknown family '" + family + "'");
}

inline PolyMesh make_mesh(const ExperimentConfig& cfg) {
  return make_mesh(cfg.mesh, cfg.n, cfg.lloyd_iters, cfg.seed);
}

inline SmootherKind smoother_kind(const std::string& name) {
  return name == "gs" ? SmootherKind::sym_gauss_seidel : SmootherKind::richardson;
}

namespace detail {

inline std::string csv_num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_csv(const ExperimentConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) return;
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + cfg.out + "' for writing");
  f << text;
}

inline std::string config_comment(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# mesh=" << cfg.mesh << " n=" << cfg.n << " lloyd=" << cfg.lloyd_iters
     << " seed=" << cfg.seed << "\n";
  return os.str();
}

inline const ScalarField& unit_load() {
  static const ScalarField f = [](const Vec2&) { return 1.0; };
  return f;
}

}  // namespace detail

/// Condition numbers of the stiffness matrix in both internal-dof modes,
/// with an algebraic fit of the orthonormal column and an exponential fit of
/// the monomial column, both over p >= 3.
inline std::string run_table1(const ExperimentConfig& cfg) {
  cfg.validate();
  const PolyMesh mesh = make_mesh(cfg);
  std::ostringstream os;
  os << "# schema pvem.table1.v1\n" << detail::config_comment(cfg);
  os << "p,kappa_orthonormal,kappa_monomial,status\n";

  std::vector<double> ps_orth, k_orth, ps_mono, k_mono;
  for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
    std::string cell_orth, cell_mono, status = "ok";
    try {
      const GlobalSystem sys = assemble_global(mesh, p, {}, InternalDofMode::orthonormal);
      const double k = condition_number(sys.K);
      cell_orth = detail::csv_num(k);
      if (p >= 3) {
        ps_orth.push_back(p);
        k_orth.push_back(k);
      }
    } catch (const std::exception&) {
      status = "failed_orthonormal";
    }
    try {
      const GlobalSystem sys = assemble_global(mesh, p, {}, InternalDofMode::monomial);
      const double k = condition_number(sys.K);
      cell_mono = detail::csv_num(k);
      if (p >= 3) {
        ps_mono.push_back(p);
        k_mono.push_back(k);
      }
    } catch (const std::exception&) {
      status = status == "ok" ? "failed_monomial" : "failed_both";
    }
    os << p << "," << cell_orth << "," << cell_mono << "," << status << "\n";
  }
  if (ps_orth.size() >= 2) {
    const RateFit fa = fit_algebraic(ps_orth, k_orth);
    os << "# fit_orthonormal model=algebraic C=" << detail::csv_num(fa.c0)
       << " s=" << detail::csv_num(fa.c1) << " r2=" << detail::csv_num(fa.r2) << "\n";
  }
  if (ps_mono.size() >= 2) {
    const RateFit fe = fit_exponential(ps_mono, k_mono);
    os << "# fit_monomial model=exponential a=" << detail::csv_num(fe.c0)
       << " b=" << detail::csv_num(fe.c1) << " r2=" << detail::csv_num(fe.r2) << "\n";
  }
  detail::write_csv(cfg, os.str());
  return os.str();
}

/// Convergence-factor sweep over (p, K, m) for the configured mesh and
/// smoother; non-converged cells carry status "x" as in the reference tables.
inline std::string run_rho_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const PolyMesh mesh = make_mesh(cfg);
  const SmootherKind kind = smoother_kind(cfg.smoother);
  std::ostringstream os;
  os << "# schema pvem.rho.v1\n" << detail::config_comment(cfg);
  os << "mesh,p,K,m,smoother,rho,iterations,status\n";

  for (int p = std::max(2, cfg.p_min); p <= cfg.p_max; ++p) {
    const int k_lo = cfg.levels > 0 ? std::min(cfg.levels, p) : 2;
    const int k_hi = cfg.levels > 0 ? std::min(cfg.levels, p) : p;
    for (int k = k_lo; k <= k_hi; ++k) {
      std::string row_error;
      Hierarchy h;
      try {
        h = build_hierarchy(mesh, p, k, kind, detail::unit_load(),
                            InternalDofMode::orthonormal, cfg.lambda_safety);
      } catch (const std::exception& e) {
        row_error = e.what();
      }
      for (int msteps : cfg.m_list) {
        os << cfg.mesh << "," << p << "," << k << "," << msteps << "," << cfg.smoother << ",";
        if (!row_error.empty()) {
          os << ",,error\n";
          continue;
        }
        const SolveReport rep =
            mg_solve(h, h.rhs_fine, Eigen::VectorXd::Zero(h.rhs_fine.size()), msteps,
                     cfg.tol, cfg.maxit);
        os << (std::isnan(rep.rho) ? "" : detail::csv_num(rep.rho)) << ","
           << rep.iterations << "," << (rep.converged ? "converged" : "x") << "\n";
      }
    }
  }
  detail::write_csv(cfg, os.str());
  return os.str();
}

/// Minimum post-smoothing steps for convergence over the three mesh
/// families, p = 2..p_max and every admissible K.
inline std::string run_min_smoothing(const ExperimentConfig& cfg) {
  cfg.validate();
  const SmootherKind kind = smoother_kind(cfg.smoother);
  std::ostringstream os;
  os << "# schema pvem.minsmooth.v1\n" << detail::config_comment(cfg);
  os << "mesh,p,K,min_m,status\n";
  for (const std::string family : {"square", "voronoi", "hex"}) {
    const PolyMesh mesh = make_mesh(family, cfg.n, cfg.lloyd_iters, cfg.seed);
    for (int p = std::max(2, cfg.p_min); p <= cfg.p_max; ++p) {
      const int k_lo = cfg.levels > 0 ? std::min(cfg.levels, p) : 2;
      const int k_hi = cfg.levels > 0 ? std::min(cfg.levels, p) : p;
      for (int k = k_lo; k <= k_hi; ++k) {
        const Hierarchy h = build_hierarchy(mesh, p, k, kind, detail::unit_load(),
                                            InternalDofMode::orthonormal, cfg.lambda_safety);
        const auto min_m = min_smoothing_steps(h, h.rhs_fine, cfg.m_max, cfg.tol, cfg.maxit);
        os << family << "," << p << "," << k << ",";
        if (min_m)
          os << *min_m << ",found\n";
        else
          os << "," << "none<=" << cfg.m_max << "\n";
      }
    }
  }
  detail::write_csv(cfg, os.str());
  return os.str();
}

/// Power-method estimate of the largest eigenvalue per degree, with an
/// algebraic growth fit over the requested range.
inline std::string run_lambda_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const PolyMesh mesh = make_mesh(cfg);
  std::ostringstream os;
  os << "# schema pvem.lambda.v1\n" << detail::config_comment(cfg);
  os << "mesh,p,lambda\n";
  std::vector<double> ps, ls;
  for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
    const GlobalSystem sys = assemble_global(mesh, p, {});
    const double lambda = estimate_lambda(sys.K);
    os << cfg.mesh << "," << p << "," << detail::csv_num(lambda) << "\n";
    ps.push_back(p);
    ls.push_back(lambda);
  }
  if (ps.size() >= 2) {
    const RateFit fit = fit_algebraic(ps, ls);
    os << "# fit model=algebraic C=" << detail::csv_num(fit.c0)
       << " s=" << detail::csv_num(fit.c1) << " r2=" << detail::csv_num(fit.r2) << "\n";
  }
  detail::write_csv(cfg, os.str());
  return os.str();
}

/// Four-way iteration-count comparison per degree: plain CG, PCG-IC(0), and
/// PCG with one W-cycle (Richardson and Gauss-Seidel smoothing, coarsest
/// level p = 1). Non-convergence at maxit is recorded as "maxit+".
inline std::string run_pcg_comparison(const ExperimentConfig& cfg) {
  cfg.validate();
  const PolyMesh mesh = make_mesh(cfg);
  std::ostringstream os;
  os << "# schema pvem.pcg.v1\n" << detail::config_comment(cfg);
  os << "mesh,p,n_dofs,iters_cg,iters_pcg_ic0,iters_pcg_mg_richardson,iters_pcg_mg_gs\n";
  auto count = [&](const SolveReport& rep) {
    return rep.converged ? std::to_string(rep.iterations)
                         : std::to_string(cfg.maxit) + "+";
  };
  for (int p = std::max(2, cfg.p_min); p <= cfg.p_max; ++p) {
    const Hierarchy h_rich = build_hierarchy(mesh, p, p, SmootherKind::richardson,
                                             detail::unit_load(),
                                             InternalDofMode::orthonormal, cfg.lambda_safety);
    const Hierarchy h_gs = build_hierarchy(mesh, p, p, SmootherKind::sym_gauss_seidel,
                                           detail::unit_load(),
                                           InternalDofMode::orthonormal, cfg.lambda_safety);
    const SparseMat& k = h_rich.finest().K;
    const Eigen::VectorXd& f = h_rich.rhs_fine;
    const SolveReport r_cg = cg(k, f, cfg.pcg_tol, cfg.maxit);
    const SolveReport r_ic = pcg(k, f, ic0_preconditioner(k), cfg.pcg_tol, cfg.maxit);
    const SolveReport r_mg_rich = pcg(k, f, mg_preconditioner(h_rich, cfg.m), cfg.pcg_tol,
                                      cfg.maxit, !cfg.strict_pcg);
    const SolveReport r_mg_gs = pcg(k, f, mg_preconditioner(h_gs, cfg.m), cfg.pcg_tol,
                                    cfg.maxit, !cfg.strict_pcg);
    os << cfg.mesh << "," << p << "," << k.rows() << "," << count(r_cg) << ","
       << count(r_ic) << "," << count(r_mg_rich) << "," << count(r_mg_gs) << "\n";
  }
  detail::write_csv(cfg, os.str());
  return os.str();
}

/// A fixed polynomial of exactly degree p used by the patch tests.
inline Poly2 patch_polynomial(int p) {
  Poly2 u(p);
  const double coeffs[] = {0.375, 1.25, -0.875, 0.6, -1.1, 0.45,
                           0.3,   -0.7, 0.55,   0.2, -0.4, 0.35,
                           0.15,  -0.3, 0.25,   0.1, -0.2, 0.18,
                           0.08,  -0.15, 0.12};
  int idx = 0;
  for (int d = 0; d <= p; ++d)
    for (int i = 0; i <= d; ++i, ++idx)
      u.coeff(d - i, i) = coeffs[idx % (sizeof(coeffs) / sizeof(coeffs[0]))];
  return u;
}

/// Per-family, per-degree patch test: solve with f = -lap(u), g = u, and
/// compare against the dof interpolant of u.
inline std::string run_patch_test(const ExperimentConfig& cfg) {
  cfg.validate();
  std::ostringstream os;
  os << "# schema pvem.patchtest.v1\n" << detail::config_comment(cfg);
  os << "mesh,p,max_rel_err,pass\n";
  for (const std::string family : {"square", "voronoi", "hex"}) {
    const PolyMesh mesh = make_mesh(family, cfg.n, cfg.lloyd_iters, cfg.seed);
    for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
      const Poly2 u = patch_polynomial(p);
      const Poly2 lap = u.laplacian();
      const ScalarField uf = [&u](const Vec2& x) { return u(x); };
      const ScalarField ff = [&lap](const Vec2& x) { return -lap(x); };
      const GlobalSystem sys = assemble_global(mesh, p, ff, InternalDofMode::orthonormal, uf);
      Eigen::SimplicialLDLT<SparseMat> solver(sys.K);
      if (solver.info() != Eigen::Success)
        throw std::runtime_error("patch test: factorization failed");
      const Eigen::VectorXd u_full = sys.full_vector(solver.solve(sys.rhs));
      const Eigen::VectorXd u_exact = interpolate_dofs(mesh, p, uf);
      const double scale = u_exact.cwiseAbs().maxCoeff();
      const double err = (u_full - u_exact).cwiseAbs().maxCoeff() / scale;
      os << family << "," << p << "," << detail::csv_num(err) << ","
         << (err <= 1e-8 ? "yes" : "no") << "\n";
    }
  }
  detail::write_csv(cfg, os.str());
  return os.str();
}

}  // namespace pvem
