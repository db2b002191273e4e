#include <catch2/catch_amalgamated.hpp>

#include <pvem/geometry/generators.hpp>
#include <pvem/transfer/transfer.hpp>
#include <pvem/util/poly2.hpp>

#include <random>

using namespace pvem;

namespace {

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 2.0 * detail::canonical_double(rng) - 1.0;
  return v;
}

}  // namespace

TEST_CASE("edge prolongation 1d") {
  {
    // constants are reproduced
    const Eigen::MatrixXd m = edge_prolongation_1d(3);
    const Eigen::VectorXd out = m * Eigen::VectorXd::Ones(3);
    for (int i = 0; i < out.size(); ++i) CHECK(out[i] == Catch::Approx(1.0).margin(1e-14));
  }
  {
    // p=2: a linear function with endpoint values (0,1) has value 1/2 at the
    // fine midpoint node
    const Eigen::MatrixXd m = edge_prolongation_1d(2);
    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 2);
    Eigen::Vector2d vals(0.0, 1.0);
    const Eigen::VectorXd out = m * vals;
    CHECK(out[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(out[1] == Catch::Approx(0.5).margin(1e-14));
    CHECK(out[2] == Catch::Approx(1.0).margin(1e-15));
  }
  {
    // p=4: a random cubic sampled at the coarse nodes lands on its own values
    const int p = 4;
    const Eigen::MatrixXd m = edge_prolongation_1d(p);
    std::mt19937_64 rng(5);
    Eigen::VectorXd c(p);
    for (int i = 0; i < p; ++i) c[i] = 2.0 * detail::canonical_double(rng) - 1.0;
    auto cubic = [&](double x) { return c[0] + x * (c[1] + x * (c[2] + x * c[3])); };
    const QuadRule1D& coarse = gauss_lobatto_1d(p);
    const QuadRule1D& fine = gauss_lobatto_1d(p + 1);
    Eigen::VectorXd coarse_vals(p);
    for (int i = 0; i < p; ++i) coarse_vals[i] = cubic(coarse.nodes[i]);
    const Eigen::VectorXd out = m * coarse_vals;
    for (int i = 0; i <= p; ++i)
      CHECK(out[i] == Catch::Approx(cubic(fine.nodes[i])).margin(1e-12));
  }
}

TEST_CASE("prolongation structure") {
  PolyMesh m = generate_voronoi_lloyd_mesh(9, 40, 5);
  for (int p : {2, 3, 5}) {
    const DofMap coarse = build_dof_map(m, p - 1);
    const DofMap fine = build_dof_map(m, p);
    const TransferPair tp = build_prolongation(coarse, fine, m);

    std::vector<int> row_nnz(fine.n_total, 0);
    for (int c = 0; c < tp.P.outerSize(); ++c)
      for (SparseMat::InnerIterator it(tp.P, c); it; ++it)
        if (it.value() != 0.0) row_nnz[it.row()]++;

    // vertex rows are unit rows
    for (int v = 0; v < m.n_vertices(); ++v) {
      CHECK(row_nnz[v] == 1);
      CHECK(tp.P.coeff(v, v) == 1.0);
    }

    // moment rows of order p-2 are identically zero
    const int n_keep = poly_space_dim(p - 3);
    for (int el = 0; el < m.n_elements(); ++el)
      for (int k = n_keep; k < fine.moments_per_element; ++k)
        CHECK(row_nnz[fine.moment_dof(el, k)] == 0);

    // degree gap != 1 is rejected
    if (p >= 3) {
      const DofMap lower = build_dof_map(m, p - 2);
      CHECK_THROWS_AS(build_prolongation(lower, fine, m), std::invalid_argument);
    }

    // boundary fine dofs only reference boundary coarse dofs
    for (int c = 0; c < tp.P.outerSize(); ++c)
      for (SparseMat::InnerIterator it(tp.P, c); it; ++it)
        if (!coarse.is_boundary[it.col()] && it.value() != 0.0)
          CHECK_FALSE(fine.is_boundary[it.row()]);
  }
}

TEST_CASE("restriction is the transpose") {
  PolyMesh m = generate_voronoi_lloyd_mesh(9, 40, 5);
  const int p = 4;
  const DofMap coarse = build_dof_map(m, p - 1);
  const DofMap fine = build_dof_map(m, p);
  const TransferPair tp = build_prolongation(coarse, fine, m);

  CHECK(apply_restriction(tp, Eigen::VectorXd::Zero(fine.n_total)).norm() == 0.0);

  const Eigen::VectorXd v = random_vector(fine.n_total, 11);
  const Eigen::VectorXd w = random_vector(coarse.n_total, 12);
  const double a = apply_restriction(tp, v).dot(w);
  const double b = v.dot(tp.P * w);
  CHECK(a == Catch::Approx(b).epsilon(1e-15));

  // a fine vector supported on the order-(p-2) moments restricts to zero
  Eigen::VectorXd top = Eigen::VectorXd::Zero(fine.n_total);
  for (int el = 0; el < m.n_elements(); ++el)
    for (int k = poly_space_dim(p - 3); k < fine.moments_per_element; ++k)
      top[fine.moment_dof(el, k)] = 1.0;
  CHECK(apply_restriction(tp, top).norm() == 0.0);

  CHECK_THROWS_AS(apply_restriction(tp, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("prolongation reproduces global polynomials") {
  PolyMesh m = generate_voronoi_lloyd_mesh(9, 40, 5);
  for (int p : {2, 4}) {
    // u in P_{p-1} with fixed coefficients
    Poly2 u(p - 1);
    u.coeff(0, 0) = 0.3;
    u.coeff(1, 0) = 1.0;
    u.coeff(0, 1) = -0.7;
    if (p - 1 >= 2) u.coeff(1, 1) = 0.9;
    if (p - 1 >= 3) u.coeff(2, 1) = -0.4;
    auto uf = [&](const Vec2& x) { return u(x); };

    const DofMap coarse = build_dof_map(m, p - 1);
    const DofMap fine = build_dof_map(m, p);
    const TransferPair tp = build_prolongation(coarse, fine, m);

    const Eigen::VectorXd coarse_dofs = interpolate_dofs(m, p - 1, uf);
    const Eigen::VectorXd fine_dofs = tp.P * coarse_dofs;

    // boundary dofs (vertex + edge) equal u at the fine nodes
    const int n_be = fine.n_vertex_dofs + fine.n_edge_dofs;
    for (int i = 0; i < n_be; ++i) {
      INFO("p = " << p << " dof " << i);
      CHECK(std::abs(fine_dofs[i] - uf(fine.node[i])) <= 1e-11);
    }
    // moments of order <= p-3 equal the interpolant's fine moments
    const Eigen::VectorXd fine_exact = interpolate_dofs(m, p, uf);
    for (int el = 0; el < m.n_elements(); ++el)
      for (int k = 0; k < poly_space_dim(p - 3); ++k) {
        const int d = fine.moment_dof(el, k);
        CHECK(fine_dofs[d] == Catch::Approx(fine_exact[d]).margin(1e-10));
      }
  }
}

TEST_CASE("composed prolongation carries P1 data up the hierarchy") {
  PolyMesh m = generate_square_mesh(3);
  auto u = [](const Vec2& x) { return 0.25 + 2.0 * x.x() - x.y(); };
  const int p_top = 4;

  std::vector<DofMap> dms;
  for (int p = 1; p <= p_top; ++p) dms.push_back(build_dof_map(m, p));
  Eigen::VectorXd v = interpolate_dofs(m, 1, u);
  for (int p = 2; p <= p_top; ++p) {
    const TransferPair tp = build_prolongation(dms[p - 2], dms[p - 1], m);
    v = tp.P * v;
  }
  const DofMap& top = dms[p_top - 1];
  for (int i = 0; i < top.n_vertex_dofs + top.n_edge_dofs; ++i)
    CHECK(std::abs(v[i] - u(top.node[i])) <= 1e-10);
  // every moment was zeroed at its introduction (order p-2 rule) and then
  // copied, so the composed vector carries no moments at all
  for (int el = 0; el < m.n_elements(); ++el)
    for (int k = 0; k < top.moments_per_element; ++k)
      CHECK(v[top.moment_dof(el, k)] == 0.0);
}

TEST_CASE("free submatrix matches the full matrix on free dofs") {
  PolyMesh m = generate_voronoi_lloyd_mesh(9, 40, 5);
  const int p = 3;
  const DofMap coarse = build_dof_map(m, p - 1);
  const DofMap fine = build_dof_map(m, p);
  const TransferPair tp = build_prolongation(coarse, fine, m);

  Eigen::VectorXd coarse_full = Eigen::VectorXd::Zero(coarse.n_total);
  const Eigen::VectorXd coarse_free = random_vector(coarse.n_free, 77);
  for (int i = 0; i < coarse.n_free; ++i) coarse_full[coarse.global_of_free[i]] = coarse_free[i];

  const Eigen::VectorXd fine_full = tp.P * coarse_full;
  const Eigen::VectorXd fine_free = tp.P_free * coarse_free;
  for (int i = 0; i < fine.n_free; ++i)
    CHECK(fine_free[i] == fine_full[fine.global_of_free[i]]);
  // prolongation of a free coarse vector stays free
  for (int i = 0; i < fine.n_total; ++i)
    if (fine.is_boundary[i]) CHECK(fine_full[i] == 0.0);
}
