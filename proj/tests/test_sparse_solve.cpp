#include "mns/assembly.hpp"
#include "mns/solvers.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mns;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& d, bool symmetric = false) {
  std::vector<Triplet> t;
  for (int i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.cols(); ++j) {
      if (d(i, j) != 0.0) t.push_back({i, j, d(i, j)});
    }
  }
  return SparseMatrix::from_triplets(static_cast<int>(d.rows()), static_cast<int>(d.cols()), t, symmetric);
}

// 1D P1 Laplacian on n interior nodes, h = 1/(n+1).
Eigen::MatrixXd laplacian_1d(int n) {
  const double h = 1.0 / (n + 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0 / h;
    if (i > 0) a(i, i - 1) = -1.0 / h;
    if (i + 1 < n) a(i, i + 1) = -1.0 / h;
  }
  return a;
}

SolverOptions options(SolverMethod m) {
  SolverOptions o;
  o.method = m;
  return o;
}

class BothMethods : public ::testing::TestWithParam<SolverMethod> {};

}  // namespace

TEST(SparseMatrix, TripletsSumDuplicatesAndSortColumns) {
  const SparseMatrix a = SparseMatrix::from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {1, 1, -1.0}});
  EXPECT_EQ(a.nonzeros(), 3u);
  EXPECT_EQ(a.coeff(0, 2), 4.0);
  EXPECT_EQ(a.coeff(0, 0), 2.0);
  EXPECT_EQ(a.coeff(1, 0), 0.0);
  const auto cols = a.col_idx();
  EXPECT_LT(cols[0], cols[1]);
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
}

TEST(SparseMatrix, ProductsMatchDense) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(6, 4);
  for (int k = 0; k < 12; ++k) d(rng() % 6, rng() % 4) = u(rng);
  const SparseMatrix a = from_dense(d);
  Vector x(4), y(6);
  for (auto& v : x) v = u(rng);
  for (auto& v : y) v = u(rng);
  EXPECT_LT((a * x - d * x).norm(), 1e-14);
  EXPECT_LT((a.transpose_multiply(y) - d.transpose() * y).norm(), 1e-14);
  EXPECT_LT((a.transpose().to_dense() - d.transpose()).norm(), 1e-14);
  EXPECT_LT((Eigen::MatrixXd(a.to_eigen()) - d).norm(), 1e-14);
}

TEST(SparseMatrix, LinearCombinationAndInterleave) {
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 2.0}});
  const SparseMatrix b = SparseMatrix::from_triplets(2, 2, {{0, 1, 5.0}, {1, 0, 1.0}});
  const Eigen::MatrixXd c = linear_combination(2.0, a, -1.0, b).to_dense();
  Eigen::MatrixXd expect(2, 2);
  expect << 2, -5, 3, 0;
  EXPECT_EQ(c, expect);
  const Eigen::MatrixXd v = interleave_blocks(a, 2).to_dense();
  EXPECT_EQ(v(0, 0), 1.0);
  EXPECT_EQ(v(1, 1), 1.0);
  EXPECT_EQ(v(2, 0), 2.0);
  EXPECT_EQ(v(3, 1), 2.0);
  EXPECT_EQ(v(2, 1), 0.0);
}

TEST(SparseMatrix, SymmetricElimination) {
  Eigen::MatrixXd d = laplacian_1d(4);
  SparseMatrix a = from_dense(d, true);
  const std::vector<int> dofs{0, 3};
  a.eliminate_symmetric(dofs);
  const Eigen::MatrixXd e = a.to_dense();
  EXPECT_EQ(a.symmetry_error(), 0.0);
  EXPECT_EQ(e(0, 0), 1.0);
  EXPECT_EQ(e(0, 1), 0.0);
  EXPECT_EQ(e(1, 0), 0.0);
  EXPECT_EQ(e(1, 1), d(1, 1));
}

TEST_P(BothMethods, IdentityAndDiagonal) {
  const SpdSolver id = prepare_spd(SparseMatrix::identity(3), options(GetParam()));
  const Vector b = Vector::LinSpaced(3, 1, 3);
  EXPECT_LT((solve_spd(id, b) - b).norm(), 1e-14);

  const SpdSolver diag = prepare_spd(SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {1, 1, 4.0}}, true),
                                     options(GetParam()));
  const Vector x = solve_spd(diag, Vector{{2.0, 8.0}});
  EXPECT_NEAR(x[0], 1.0, 1e-14);
  EXPECT_NEAR(x[1], 2.0, 1e-14);
}

TEST_P(BothMethods, LaplacianMatchesDenseOracle) {
  const Eigen::MatrixXd d = laplacian_1d(5);
  const Vector b{{1.0, -2.0, 0.5, 3.0, 1.0}};
  const Vector oracle = d.fullPivLu().solve(b);
  const Vector x = solve_spd(prepare_spd(from_dense(d, true), options(GetParam())), b);
  EXPECT_LT((x - oracle).norm(), 1e-10 * oracle.norm());
}

TEST_P(BothMethods, RandomSpdMatchesDenseOracle) {
  std::mt19937 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd g(8, 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) g(i, j) = n(rng);
  }
  const Eigen::MatrixXd a = g * g.transpose() + 8.0 * Eigen::MatrixXd::Identity(8, 8);
  Vector b(8);
  for (auto& v : b) v = n(rng);
  const Vector oracle = a.ldlt().solve(b);
  SolveStats stats;
  const Vector x = solve_spd(prepare_spd(from_dense(a, true), options(GetParam())), b, &stats);
  EXPECT_LT((x - oracle).norm(), 1e-9 * oracle.norm());
  EXPECT_LE(stats.relative_residual, 1e-10);
  EXPECT_LT((a * x - b).norm(), 1e-10 * b.norm());
}

TEST_P(BothMethods, ZeroRhsGivesZero) {
  const SpdSolver s = prepare_spd(from_dense(laplacian_1d(4), true), options(GetParam()));
  EXPECT_EQ(solve_spd(s, Vector::Zero(4)).norm(), 0.0);
}

TEST_P(BothMethods, RejectsIndefinite) {
  Eigen::MatrixXd d(2, 2);
  d << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
  EXPECT_THROW(
      {
        const SpdSolver s = prepare_spd(from_dense(d, true), options(GetParam()));
        solve_spd(s, Vector{{1.0, -1.0}});
      },
      SolverError);
}

TEST(SpdSolver, RejectsNonpositiveDiagonal) {
  EXPECT_THROW(prepare_spd(SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}}, true)), SolverError);
}

TEST(SpdSolver, ReuseIsBitwiseForDirect) {
  const SparseMatrix a = from_dense(laplacian_1d(6), true);
  const SpdSolver once = prepare_spd(a);
  for (int k = 0; k < 3; ++k) {
    const Vector b = Vector::LinSpaced(6, k, 2 * k + 1);
    EXPECT_EQ(solve_spd(once, b), solve_spd(prepare_spd(a), b));
  }
}

// Generalized Stokes on a small Taylor-Hood mesh.
namespace {

struct StokesFixture {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FeSpace> vel, pres;
  SparseMatrix A, B, Mp;
  SparseMatrix A_raw, B_raw;

  StokesFixture(int n, double sigma) {
    mesh = std::make_shared<const Mesh>(build_rect_mesh(n, n, {0, 1, 0, 1}));
    vel = FeSpace::vector(mesh, 2);
    pres = FeSpace::scalar(mesh, 1);
    A_raw = linear_combination(sigma, assemble_mass(*vel), 1.0, assemble_stiffness(*vel));
    B_raw = assemble_div(*vel, *pres);
    A = A_raw;
    A.eliminate_symmetric(vel->boundary_dofs());
    B = B_raw;
    B.zero_columns(vel->boundary_dofs());
    Mp = assemble_mass(*pres);
  }
};

}  // namespace

TEST_P(BothMethods, StokesZeroRhs) {
  StokesFixture f(4, 10.0);
  const StokesSolver s = prepare_stokes(f.A, f.B, f.Mp, options(GetParam()));
  const StokesSolution sol = solve_stokes(s, Vector::Zero(f.vel->dof_count()));
  EXPECT_EQ(sol.velocity.norm(), 0.0);
  EXPECT_EQ(sol.pressure.norm(), 0.0);
}

TEST_P(BothMethods, StokesBodyForceIsDivergenceFree) {
  StokesFixture f(6, 10.0);
  const StokesSolver s = prepare_stokes(f.A, f.B, f.Mp, options(GetParam()));
  Vector rhs = assemble_load([](Point, double) { return Vec2{0.0, -1.0}; }, *f.vel, 0.0);
  // Make the load non-gradient so the velocity is nonzero.
  rhs += assemble_load([](Point x, double) { return Vec2{std::sin(3 * x.y), 0.0}; }, *f.vel, 0.0);
  zero_dofs(rhs, f.vel->boundary_dofs());
  SolveStats stats;
  const StokesSolution sol = solve_stokes(s, rhs, &stats);
  EXPECT_GT(sol.velocity.norm(), 0.0);
  EXPECT_LE(stats.divergence_residual, 1e-8);
  EXPECT_LE(stats.relative_residual, 1e-10);
  const double div = (f.B * sol.velocity).norm() / (f.B.max_abs() * sol.velocity.norm());
  EXPECT_LE(div, 1e-8);
  const Vector w = f.Mp * Vector::Ones(f.pres->dof_count());
  EXPECT_NEAR(w.dot(sol.pressure), 0.0, 1e-12);
}

TEST(StokesSolver, DirectAndIterativeAgree) {
  StokesFixture f(5, 4.0);
  Vector rhs = assemble_load([](Point x, double) { return Vec2{x.y * x.y, std::cos(2 * x.x)}; }, *f.vel, 0.0);
  zero_dofs(rhs, f.vel->boundary_dofs());
  const StokesSolution a = solve_stokes(prepare_stokes(f.A, f.B, f.Mp, options(SolverMethod::direct)), rhs);
  const StokesSolution b = solve_stokes(prepare_stokes(f.A, f.B, f.Mp, options(SolverMethod::iterative)), rhs);
  EXPECT_LT((a.velocity - b.velocity).norm(), 1e-8 * a.velocity.norm());
  EXPECT_LT((a.pressure - b.pressure).norm(), 1e-7 * a.pressure.norm());
}

TEST(StokesSolver, BatchedSolveMatchesSingle) {
  StokesFixture f(5, 4.0);
  const StokesSolver s = prepare_stokes(f.A, f.B, f.Mp);
  Vector r1 = assemble_load([](Point x, double) { return Vec2{x.y, -x.x}; }, *f.vel, 0.0);
  Vector r2 = assemble_load([](Point x, double) { return Vec2{std::exp(x.x), x.x * x.y}; }, *f.vel, 0.0);
  zero_dofs(r1, f.vel->boundary_dofs());
  zero_dofs(r2, f.vel->boundary_dofs());
  const auto batch = s.solve(std::vector<Vector>{r1, Vector::Zero(r1.size()), r2});
  ASSERT_EQ(batch.size(), 3u);
  EXPECT_LT((batch[0].velocity - s.solve(r1).velocity).norm(), 1e-12 * batch[0].velocity.norm());
  EXPECT_EQ(batch[1].velocity.norm(), 0.0);
  EXPECT_LT((batch[2].pressure - s.solve(r2).pressure).norm(), 1e-12 * batch[2].pressure.norm());
}

TEST(StokesSolver, SaddleSolutionMatchesDenseOracle) {
  StokesFixture f(3, 2.0);
  Vector rhs = assemble_load([](Point x, double) { return Vec2{1.0 + x.x, x.y * x.y}; }, *f.vel, 0.0);
  zero_dofs(rhs, f.vel->boundary_dofs());
  const int nu = f.vel->dof_count(), np = f.pres->dof_count();
  // Bordered system with a mean constraint.
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nu + np + 1, nu + np + 1);
  K.topLeftCorner(nu, nu) = f.A.to_dense();
  K.block(0, nu, nu, np) = -f.B.to_dense().transpose();
  K.block(nu, 0, np, nu) = f.B.to_dense();
  const Vector w = f.Mp * Vector::Ones(np);
  K.block(nu, nu + np, np, 1) = w;
  K.block(nu + np, nu, 1, np) = w.transpose();
  Vector b = Vector::Zero(nu + np + 1);
  b.head(nu) = rhs;
  const Vector z = K.fullPivLu().solve(b);
  const StokesSolution sol = solve_stokes(prepare_stokes(f.A, f.B, f.Mp), rhs);
  EXPECT_LT((sol.velocity - z.head(nu)).norm(), 1e-10 * z.head(nu).norm());
  EXPECT_LT((sol.pressure - z.segment(nu, np)).norm(), 1e-9 * z.segment(nu, np).norm());
}

TEST(StokesSolver, DivergenceHasCorankOne) {
  StokesFixture f(3, 1.0);
  const Eigen::MatrixXd B = f.B.to_dense();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  lu.setThreshold(1e-10);
  EXPECT_EQ(lu.rank(), f.pres->dof_count() - 1);
}

// Manufactured steady Stokes problem: sigma u - Lap u + grad p = f, div u = 0.
namespace {

double stokes_velocity_error(int n) {
  const double pi = M_PI;
  const double sigma = 1.0;
  StokesFixture f(n, sigma);
  auto ux = [&](double x, double y) { return std::pow(std::sin(pi * x), 2) * std::sin(2 * pi * y); };
  auto uy = [&](double x, double y) { return -std::sin(2 * pi * x) * std::pow(std::sin(pi * y), 2); };
  auto force = [&](Point p, double) {
    const double x = p.x, y = p.y;
    const double s = std::sin(pi * x), c = std::cos(pi * x), sy = std::sin(pi * y), cy = std::cos(pi * y);
    // Laplacians of sin^2(pi x) sin(2 pi y) and of sin(2 pi x) sin^2(pi y).
    const double lap_ux = 2 * pi * pi * (c * c - s * s) * std::sin(2 * pi * y) -
                          4 * pi * pi * s * s * std::sin(2 * pi * y);
    const double lap_uy = -(-4 * pi * pi * std::sin(2 * pi * x) * sy * sy +
                            2 * pi * pi * std::sin(2 * pi * x) * (cy * cy - sy * sy));
    const double px = pi * c * sy, py = pi * s * cy;
    return Vec2{sigma * ux(x, y) - lap_ux + px, sigma * uy(x, y) - lap_uy + py};
  };
  Vector rhs = assemble_load(force, *f.vel, 0.0);
  zero_dofs(rhs, f.vel->boundary_dofs());
  const StokesSolution sol = solve_stokes(prepare_stokes(f.A, f.B, f.Mp), rhs);
  // L2 error by quadrature against the analytic field.
  const Field uh{f.vel, sol.velocity};
  double err = 0.0;
  const auto& quad = triangle_quadrature();
  for (std::size_t k = 0; k < f.mesh->triangle_count(); ++k) {
    const ElementGeometry g = element_geometry(*f.mesh, k);
    for (const auto& qp : quad) {
      const Point x = g.map(qp.lambda);
      const Vec2 v = evaluate_vector(uh, x);
      err += qp.weight * g.area * (std::pow(v[0] - ux(x.x, x.y), 2) + std::pow(v[1] - uy(x.x, x.y), 2));
    }
  }
  return std::sqrt(err);
}

}  // namespace

TEST(StokesSolver, ManufacturedVelocityConvergesAtThirdOrder) {
  const double e8 = stokes_velocity_error(8);
  const double e16 = stokes_velocity_error(16);
  const double e32 = stokes_velocity_error(32);
  EXPECT_GE(std::log2(e8 / e16), 2.5);
  EXPECT_GE(std::log2(e16 / e32), 2.5);
}

INSTANTIATE_TEST_SUITE_P(Solvers, BothMethods, ::testing::Values(SolverMethod::direct, SolverMethod::iterative),
                         [](const auto& info) {
                           return info.param == SolverMethod::direct ? std::string("Direct") : std::string("Iterative");
                         });
