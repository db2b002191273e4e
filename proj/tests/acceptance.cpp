// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Mesh instances are fixed desk-scale configurations; every
// tolerance is pinned in code.

#include <pvem/bench/experiments.hpp>
#include <pvem/transfer/transfer.hpp>

#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace pvem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

struct Family {
  std::string name;
  PolyMesh mesh;
};

std::vector<Family> small_families() {
  return {{"square", generate_square_mesh(4)},
          {"voronoi", generate_voronoi_lloyd_mesh(16, 100, 1)},
          {"hex", generate_hexagonal_mesh(3)}};
}

std::vector<Family> large_families() {
  return {{"square", generate_square_mesh(8)},
          {"voronoi", generate_voronoi_lloyd_mesh(64, 100, 1)},
          {"hex", generate_hexagonal_mesh(8)}};
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 2.0 * detail::canonical_double(rng) - 1.0;
  return v;
}

const ScalarField kUnitLoad = [](const Vec2&) { return 1.0; };

// 1. Patch test: for p = 1..5 and each family, u in P_p with f = -lap(u) and
//    g = u gives back the dof interpolant of u to 1e-8 relative.
void criterion_1() {
  double worst = 0.0;
  std::string worst_at = "-";
  for (const auto& fam : small_families()) {
    for (int p = 1; p <= 5; ++p) {
      const Poly2 u = patch_polynomial(p);
      const Poly2 lap = u.laplacian();
      const ScalarField uf = [&u](const Vec2& x) { return u(x); };
      const ScalarField ff = [&lap](const Vec2& x) { return -lap(x); };
      const GlobalSystem sys = assemble_global(fam.mesh, p, ff, InternalDofMode::orthonormal, uf);
      Eigen::SimplicialLDLT<SparseMat> solver(sys.K);
      const Eigen::VectorXd u_full = sys.full_vector(solver.solve(sys.rhs));
      const Eigen::VectorXd u_exact = interpolate_dofs(fam.mesh, p, uf);
      const double err =
          (u_full - u_exact).cwiseAbs().maxCoeff() / u_exact.cwiseAbs().maxCoeff();
      if (err > worst) {
        worst = err;
        worst_at = fam.name + " p=" + std::to_string(p);
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max rel err %.3e at %s, tol 1e-8", worst, worst_at.c_str());
  report(1, worst <= 1e-8, "patch test, p = 1..5, all mesh families", buf);
}

// 2. Orthonormality: ||Gram - I||_max <= 1e-10 for every element at p = 8
//    (the graded basis nests, so this covers every p <= 8).
void criterion_2() {
  double worst = 0.0;
  for (const auto& fam : small_families()) {
    for (int e = 0; e < fam.mesh.n_elements(); ++e) {
      const ElementGeometry g = element_geometry(fam.mesh, e);
      const PolyBasis basis = orthonormalize(g, 8, polygon_quadrature(g, 18));
      const PolygonQuad check = polygon_quadrature(g, 20);
      Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis.dim(), basis.dim());
      for (int q = 0; q < check.size(); ++q) {
        const Eigen::VectorXd v = basis.values(check.points[q]);
        gram += check.weights[q] * v * v.transpose();
      }
      gram -= Eigen::MatrixXd::Identity(basis.dim(), basis.dim());
      worst = std::max(worst, gram.cwiseAbs().maxCoeff());
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max |Gram - I| = %.3e, tol 1e-10", worst);
  report(2, worst <= 1e-10, "basis orthonormality, p = 8, every element, all families", buf);
}

// 3. Condition-number rates on the 64-cell Voronoi-Lloyd mesh: algebraic fit
//    (orthonormal dofs, p = 3..8) with exponent 4 +- 1 and R^2 >= 0.95;
//    exponential fit (monomial dofs, p = 3..8) with b in [3.5, 5.5].
void criterion_3() {
  const PolyMesh mesh = generate_voronoi_lloyd_mesh(64, 100, 1);
  std::vector<double> ps, ko, km;
  for (int p = 3; p <= 8; ++p) {
    const GlobalSystem a = assemble_global(mesh, p, {}, InternalDofMode::orthonormal);
    const GlobalSystem b = assemble_global(mesh, p, {}, InternalDofMode::monomial);
    ps.push_back(p);
    ko.push_back(condition_number(a.K));
    km.push_back(condition_number(b.K));
  }
  const RateFit fa = fit_algebraic(ps, ko);
  const RateFit fe = fit_exponential(ps, km);
  const bool orth_ok = fa.c1 >= 3.0 && fa.c1 <= 5.0 && fa.r2 >= 0.95;
  const bool mono_ok = fe.c1 >= 3.5 && fe.c1 <= 5.5;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "orthonormal: s = %.2f (need 4 +- 1), R^2 = %.3f; monomial: b = %.2f (need "
                "[3.5, 5.5]), R^2 = %.3f",
                fa.c1, fa.r2, fe.c1, fe.r2);
  report(3, orth_ok && mono_ok, "condition-number growth rates, Voronoi 64 cells", buf);
}

// 4. Transfer identities: adjoint pairing at machine precision, order-(p-2)
//    moment rows identically zero, degree-(p-1) polynomial boundary dofs
//    reproduced to 1e-11.
void criterion_4() {
  const PolyMesh mesh = generate_voronoi_lloyd_mesh(16, 100, 1);
  bool ok = true;
  std::string detail = "all identities hold";
  for (int p = 2; p <= 5 && ok; ++p) {
    const DofMap coarse = build_dof_map(mesh, p - 1);
    const DofMap fine = build_dof_map(mesh, p);
    const TransferPair tp = build_prolongation(coarse, fine, mesh);

    const Eigen::VectorXd v = random_vector(fine.n_total, 100 + p);
    const Eigen::VectorXd w = random_vector(coarse.n_total, 200 + p);
    const double a = apply_restriction(tp, v).dot(w);
    const double b = v.dot(tp.P * w);
    if (std::abs(a - b) > 1e-13 * std::max(1.0, std::abs(b))) {
      ok = false;
      detail = "adjoint identity violated at p=" + std::to_string(p);
    }

    std::vector<int> row_nnz(fine.n_total, 0);
    for (int c = 0; c < tp.P.outerSize(); ++c)
      for (SparseMat::InnerIterator it(tp.P, c); it; ++it)
        if (it.value() != 0.0) row_nnz[it.row()]++;
    for (int el = 0; el < mesh.n_elements(); ++el)
      for (int k = poly_space_dim(p - 3); k < fine.moments_per_element; ++k)
        if (row_nnz[fine.moment_dof(el, k)] != 0) {
          ok = false;
          detail = "nonzero order-(p-2) moment row at p=" + std::to_string(p);
        }

    const Poly2 u = patch_polynomial(p - 1);
    const ScalarField uf = [&u](const Vec2& x) { return u(x); };
    const Eigen::VectorXd fine_dofs = tp.P * interpolate_dofs(mesh, p - 1, uf);
    for (int i = 0; i < fine.n_vertex_dofs + fine.n_edge_dofs; ++i)
      if (std::abs(fine_dofs[i] - uf(fine.node[i])) > 1e-11) {
        ok = false;
        detail = "boundary dof reproduction off at p=" + std::to_string(p);
      }
  }
  report(4, ok, "transfer identities, p = 2..5", detail);
}

// 5. W-cycle trend on squares, Richardson, p = 3, K = 2: rho(m=8) <= 0.85 and
//    below rho(m=6); m = 2 either fails within 1000 iterations or crawls with
//    rho > 0.99. Monotonicity of rho in m across every converged column.
void criterion_5() {
  const PolyMesh mesh = generate_square_mesh(4);
  Hierarchy h = build_hierarchy(mesh, 3, 2, SmootherKind::richardson, kUnitLoad);
  auto solve = [&](const Hierarchy& hh, int m) {
    return mg_solve(hh, hh.rhs_fine, Eigen::VectorXd::Zero(hh.rhs_fine.size()), m, 1e-8, 1000);
  };
  const SolveReport r8 = solve(h, 8);
  const SolveReport r6 = solve(h, 6);
  const SolveReport r2 = solve(h, 2);
  bool ok = r8.converged && r8.rho <= 0.85 && r6.converged && r8.rho < r6.rho;
  ok = ok && (!r2.converged || r2.rho > 0.99);

  std::string mono_detail;
  for (const auto& [p, k] : std::vector<std::pair<int, int>>{
           {2, 2}, {3, 2}, {3, 3}, {4, 3}, {4, 4}, {5, 3}, {5, 4}}) {
    Hierarchy hp = build_hierarchy(mesh, p, k, SmootherKind::richardson, kUnitLoad);
    double prev_rho = 2.0;
    bool prev_conv = false;
    for (int m : {2, 4, 6, 8}) {
      const SolveReport rep = solve(hp, m);
      if (rep.converged && prev_conv && rep.rho > prev_rho + 1e-12) {
        ok = false;
        mono_detail = "; rho not monotone at p=" + std::to_string(p) +
                      " K=" + std::to_string(k) + " m=" + std::to_string(m);
      }
      if (rep.converged) {
        prev_rho = rep.rho;
        prev_conv = true;
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "rho(m=8) = %.3f (need <= 0.85), rho(m=6) = %.3f, m=2 %s%s",
                r8.rho, r6.rho, r2.converged ? ("rho " + std::to_string(r2.rho)).c_str() : "x",
                mono_detail.c_str());
  report(5, ok, "W-cycle convergence trend, squares, Richardson, p=3, K=2", buf);
}

// 6. Gauss-Seidel beats Richardson on at least 90% of the matched converged
//    sweep cells.
void criterion_6() {
  const PolyMesh mesh = generate_square_mesh(4);
  int matched = 0, gs_wins = 0;
  for (const auto& [p, k] : std::vector<std::pair<int, int>>{
           {2, 2}, {3, 2}, {3, 3}, {4, 3}, {4, 4}, {5, 3}, {5, 4}}) {
    Hierarchy h_r = build_hierarchy(mesh, p, k, SmootherKind::richardson, kUnitLoad);
    Hierarchy h_g = build_hierarchy(mesh, p, k, SmootherKind::sym_gauss_seidel, kUnitLoad);
    for (int m : {2, 4, 6, 8}) {
      const SolveReport rr =
          mg_solve(h_r, h_r.rhs_fine, Eigen::VectorXd::Zero(h_r.rhs_fine.size()), m);
      const SolveReport rg =
          mg_solve(h_g, h_g.rhs_fine, Eigen::VectorXd::Zero(h_g.rhs_fine.size()), m);
      if (rr.converged && rg.converged) {
        ++matched;
        if (rg.rho < rr.rho) ++gs_wins;
      }
    }
  }
  const double frac = matched > 0 ? static_cast<double>(gs_wins) / matched : 0.0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "GS faster in %d/%d matched cells (%.0f%%, need >= 90%%)",
                gs_wins, matched, 100.0 * frac);
  report(6, matched > 0 && frac >= 0.9, "Gauss-Seidel vs Richardson", buf);
}

// 7. Error-operator oracle on systems with <= 200 free dofs: the explicitly
//    assembled E_{p,m} maps z* - z0 to z* - z_MG within 1e-9.
void criterion_7() {
  bool ok = true;
  std::string detail;
  for (const auto& [p, msteps, n_cells] :
       std::vector<std::tuple<int, int, int>>{{2, 2, 4}, {3, 4, 3}}) {
    const PolyMesh mesh = generate_square_mesh(n_cells);
    Hierarchy h = build_hierarchy(mesh, p, p, SmootherKind::richardson, kUnitLoad);
    const int n = static_cast<int>(h.finest().K.rows());
    if (n > 200) {
      ok = false;
      detail += " system too large;";
      continue;
    }
    std::vector<Eigen::MatrixXd> e_ops;
    e_ops.push_back(Eigen::MatrixXd::Zero(h.levels[0].K.rows(), h.levels[0].K.rows()));
    for (int l = 1; l < h.n_levels(); ++l) {
      const Level& lvl = h.levels[l];
      const int nl = static_cast<int>(lvl.K.rows());
      const Eigen::MatrixXd kd(lvl.K);
      const Eigen::MatrixXd pm(lvl.from_coarser.P_free);
      const Eigen::MatrixXd kc(h.levels[l - 1].K);
      const Eigen::MatrixXd proj = kc.ldlt().solve(pm.transpose() * kd);
      const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(nl, nl) - kd / lvl.lambda_tilde;
      Eigen::MatrixXd gm = Eigen::MatrixXd::Identity(nl, nl);
      for (int i = 0; i < msteps; ++i) gm = g * gm;
      const Eigen::MatrixXd& ep = e_ops.back();
      e_ops.push_back(gm * (Eigen::MatrixXd::Identity(nl, nl) -
                            pm * (Eigen::MatrixXd::Identity(ep.rows(), ep.cols()) - ep * ep) *
                                proj));
    }
    Eigen::SimplicialLDLT<SparseMat> direct(h.finest().K);
    const Eigen::VectorXd z_star = direct.solve(h.rhs_fine);
    const Eigen::VectorXd z0 = random_vector(n, 300 + p);
    const Eigen::VectorXd z1 = mg_cycle(h, h.n_levels() - 1, h.rhs_fine, z0, msteps);
    const Eigen::VectorXd lhs = z_star - z1;
    const Eigen::VectorXd rhs = e_ops.back() * (z_star - z0);
    const double err =
        (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff());
    char buf[96];
    std::snprintf(buf, sizeof(buf), " (p=%d,m=%d): err=%.3e, n=%d;", p, msteps, err, n);
    detail += buf;
    ok = ok && err <= 1e-9;
  }
  report(7, ok, "error-propagator identity, (p,m) = (2,2) and (3,4)", detail);
}

// 8. Spectral growth: the fitted exponent of the power-method estimate vs p
//    stays below 2.2 on all three families.
void criterion_8() {
  bool ok = true;
  std::string detail;
  for (const auto& fam : large_families()) {
    std::vector<double> ps, ls;
    for (int p = 1; p <= 6; ++p) {
      const GlobalSystem sys = assemble_global(fam.mesh, p, {});
      ps.push_back(p);
      ls.push_back(estimate_lambda(sys.K));
    }
    const RateFit fit = fit_algebraic(ps, ls);
    char buf[48];
    std::snprintf(buf, sizeof(buf), " %s: s=%.2f;", fam.name.c_str(), fit.c1);
    detail += buf;
    ok = ok && fit.c1 <= 2.2;
  }
  report(8, ok, "largest-eigenvalue growth exponent <= 2.2, all families", detail);
}

// 9. Uniform preconditioning: PCG with one MG(GS, m=8) W-cycle (coarsest
//    level p = 1, tol 1e-6) has max/min iteration ratio <= 2 over p = 2..6 on
//    Voronoi and hexagon meshes; CG counts strictly increase; PCG-IC(0)
//    counts increase.
void criterion_9() {
  bool ok = true;
  std::string detail;
  for (const auto& fam : {Family{"voronoi", generate_voronoi_lloyd_mesh(16, 100, 1)},
                          Family{"hex", generate_hexagonal_mesh(3)}}) {
    std::vector<int> mg_its, cg_its, ic_its;
    for (int p = 2; p <= 6; ++p) {
      Hierarchy h = build_hierarchy(fam.mesh, p, p, SmootherKind::sym_gauss_seidel, kUnitLoad);
      const SparseMat& k = h.finest().K;
      const Eigen::VectorXd& f = h.rhs_fine;
      const SolveReport r_cg = cg(k, f, 1e-6, 1000);
      const SolveReport r_ic = pcg(k, f, ic0_preconditioner(k), 1e-6, 1000);
      const SolveReport r_mg = pcg(k, f, mg_preconditioner(h, 8), 1e-6, 1000, true);
      if (!r_mg.converged) ok = false;
      mg_its.push_back(r_mg.iterations);
      cg_its.push_back(r_cg.iterations);
      ic_its.push_back(r_ic.iterations);
    }
    const double ratio =
        static_cast<double>(*std::max_element(mg_its.begin(), mg_its.end())) /
        *std::min_element(mg_its.begin(), mg_its.end());
    bool cg_inc = true, ic_inc = true;
    for (std::size_t i = 1; i < cg_its.size(); ++i) {
      cg_inc = cg_inc && cg_its[i] > cg_its[i - 1];
      ic_inc = ic_inc && ic_its[i] >= ic_its[i - 1];
    }
    ic_inc = ic_inc && ic_its.back() > ic_its.front();
    char buf[96];
    std::snprintf(buf, sizeof(buf), " %s: mg ratio=%.2f cg_inc=%d ic_inc=%d;",
                  fam.name.c_str(), ratio, cg_inc, ic_inc);
    detail += buf;
    ok = ok && ratio <= 2.0 && cg_inc && ic_inc;
  }
  report(9, ok, "uniform MG(GS, m=8) preconditioning over p = 2..6", detail);
}

// 10. Determinism: identical config + seed twice gives byte-identical CSV.
void criterion_10() {
  ExperimentConfig rho_cfg;
  rho_cfg.mesh = "voronoi";
  rho_cfg.n = 3;
  rho_cfg.p_max = 3;
  rho_cfg.m_list = {4, 8};
  ExperimentConfig t1_cfg;
  t1_cfg.mesh = "voronoi";
  t1_cfg.n = 3;
  t1_cfg.p_min = 1;
  t1_cfg.p_max = 4;
  const bool ok = run_rho_sweep(rho_cfg) == run_rho_sweep(rho_cfg) &&
                  run_table1(t1_cfg) == run_table1(t1_cfg) &&
                  run_pcg_comparison(rho_cfg) == run_pcg_comparison(rho_cfg);
  report(10, ok, "byte-identical CSV for identical config + seed",
         ok ? "rho, table1 and pcg runs repeated identically" : "outputs differ");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}
