#include "sobvem/analysis.hpp"
#include "sobvem/problems.hpp"
#include "sobvem/system.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <Eigen/SparseCholesky>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace sobvem;

namespace {

double max_abs(const SparseMatrix& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  }
  return v;
}

// u = (1 + t) p with a fixed quadratic p and constant coefficients; the
// initial datum is nonzero and backward Euler is exact in time.
CoefficientField affine_in_time_quadratic() {
  ManufacturedSpec s;
  s.name = "affine";
  const Matrix2 mu = (Matrix2() << 1.5, 0.2, 0.2, 1.0).finished();
  const Matrix2 eps = (Matrix2() << 0.7, -0.1, -0.1, 0.9).finished();
  s.mu = {[mu](const Point&) { return mu; }, [](const Point&) { return Point(0, 0); }};
  s.eps = {[eps](const Point&) { return eps; }, [](const Point&) { return Point(0, 0); }};
  s.beta = [](const Point&) { return Point(0, 0); };
  s.div_beta = [](const Point&) { return 0.0; };
  s.gamma = [](const Point&) { return 1.0; };
  s.solution = {[](const Point& x) { return 1.0 + x.x() - 2.0 * x.x() * x.y() + x.y() * x.y(); },
                [](const Point& x) { return Point(1.0 - 2.0 * x.y(), -2.0 * x.x() + 2.0 * x.y()); },
                [](const Point&) { return Matrix2((Matrix2() << 0, -2, -2, 2).finished()); }};
  s.theta = {[](double t) { return 1.0 + t; }, [](double) { return 1.0; }};
  return make_manufactured(s);
}

// Homogeneous data and a nonzero initial state with sigma >= 0.
CoefficientField decaying_problem() {
  CoefficientField f = make_problem("example3");
  f.name = "decay";
  f.f = [](const Point&, double) { return 0.0; };
  f.g = [](const Point&, double) { return 0.0; };
  f.u0 = [](const Point& x) {
    return std::sin(std::numbers::pi * x.x()) * std::sin(std::numbers::pi * x.y());
  };
  f.grad_u0 = [](const Point& x) {
    const double p = std::numbers::pi;
    return Point(p * std::cos(p * x.x()) * std::sin(p * x.y()),
                 p * std::sin(p * x.x()) * std::cos(p * x.y()));
  };
  f.u_exact = nullptr;
  f.grad_u_exact = nullptr;
  return f;
}

TimeStepperConfig coarse_time(double tau, double final_time) {
  TimeStepperConfig t;
  t.tau = tau;
  t.final_time = final_time;
  return t;
}

} // namespace

TEST(DofMap, CountsOnATwoByTwoGrid) {
  const PolyMesh m = generate_square_mesh(2);
  const GlobalDofMap d1 = build_dof_map(m, 1);
  EXPECT_EQ(d1.num_dofs(), 9);
  EXPECT_EQ(d1.num_active(), 1);
  EXPECT_EQ(d1.num_boundary(), 8);
  const GlobalDofMap d2 = build_dof_map(m, 2);
  EXPECT_EQ(d2.num_dofs(), 9 + 12 + 4);
  EXPECT_EQ(d2.num_active(), 1 + 4 + 4);
  const GlobalDofMap d3 = build_dof_map(m, 3);
  EXPECT_EQ(d3.num_dofs(), 9 + 24 + 12);
}

TEST(DofMap, SingleHexagonMatchesTheLocalCount) {
  std::vector<Point> pts;
  for (int i = 0; i < 6; ++i) {
    const double t = std::numbers::pi / 3.0 * i;
    pts.emplace_back(0.5 + 0.4 * std::cos(t), 0.5 + 0.4 * std::sin(t));
  }
  const PolyMesh m(pts, {{0, 1, 2, 3, 4, 5}});
  const GlobalDofMap d = build_dof_map(m, 3);
  EXPECT_EQ(d.num_dofs(), 21);
  EXPECT_EQ(d.num_active(), 3);
  std::vector<int> sorted = d.cell_dofs[0];
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 21; ++i) EXPECT_EQ(sorted[i], i);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(d.cell_dofs[0][i], i);
  for (int i = 18; i < 21; ++i) EXPECT_EQ(d.cell_dofs[0][i], i);
}

TEST(DofMap, SharedEdgesAgreeOnNodes) {
  for (const PolyMesh& mesh : sobvem::testing::sample_meshes()) {
    for (int k = 1; k <= 3; ++k) {
      const GlobalDofMap d = build_dof_map(mesh, k);
      for (int c = 0; c < mesh.num_cells(); ++c) {
        const DofLayout layout = build_dof_layout(compute_cell_geometry(mesh, c), k);
        for (int i = 0; i < layout.num_point_dofs(); ++i) {
          const int g = d.cell_dofs[c][i];
          EXPECT_LT((d.points[g] - layout.nodes[i]).norm(), 1e-14) << "cell " << c << " dof " << i;
        }
        for (int i = layout.num_point_dofs(); i < layout.size(); ++i) {
          EXPECT_GE(d.cell_dofs[c][i], d.num_point_dofs());
          EXPECT_FALSE(d.is_boundary[d.cell_dofs[c][i]]);
        }
      }
      for (int g = 0; g < d.num_point_dofs(); ++g) {
        const Point& p = d.points[g];
        const bool on_side = std::min({p.x(), p.y(), 1.0 - p.x(), 1.0 - p.y()}) < 1e-14;
        EXPECT_EQ(static_cast<bool>(d.is_boundary[g]), on_side) << "dof " << g;
      }
    }
  }
}

TEST(Assembly, OneCellGlobalEqualsLocal) {
  const PolyMesh m({{0, 0}, {1, 0}, {1.2, 0.6}, {0.5, 1}, {-0.1, 0.7}}, {{0, 1, 2, 3, 4}});
  const CoefficientField field = make_problem("example1");
  for (int k = 1; k <= 3; ++k) {
    const GlobalSystem s = assemble(m, k, field);
    const LocalForms f = build_local_forms(build_local_element(m, 0, k), field);
    const MatrixXd g = MatrixXd(s.M2.full);
    MatrixXd local = MatrixXd::Zero(g.rows(), g.cols());
    for (int i = 0; i < f.M2.rows(); ++i) {
      for (int j = 0; j < f.M2.cols(); ++j) {
        local(s.dofs.cell_dofs[0][i], s.dofs.cell_dofs[0][j]) = f.M2(i, j);
      }
    }
    EXPECT_LT((g - local).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Assembly, SharedVertexRowsAreSums) {
  const PolyMesh m({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0.5, 1}, {0, 1}},
                   {{0, 1, 4, 5}, {1, 2, 3, 4}});
  const CoefficientField field = make_problem("example3");
  const GlobalSystem s = assemble(m, 1, field);
  const LocalForms f0 = build_local_forms(build_local_element(m, 0, 1), field);
  const LocalForms f1 = build_local_forms(build_local_element(m, 1, 1), field);
  // vertex 1 is local 1 of cell 0 and local 0 of cell 1; vertex 4 is local 2 and 3
  const MatrixXd g = MatrixXd(s.A.full);
  EXPECT_NEAR(g(1, 1), f0.A(1, 1) + f1.A(0, 0), 1e-15);
  EXPECT_NEAR(g(1, 4), f0.A(1, 2) + f1.A(0, 3), 1e-15);
  EXPECT_NEAR(g(0, 1), f0.A(0, 1), 1e-15);
}

TEST(Assembly, StructuralIdentities) {
  for (const std::string name : {"example1", "example2", "example3"}) {
    const CoefficientField field = make_problem(name);
    for (const PolyMesh& mesh : sobvem::testing::sample_meshes()) {
      for (int k = 1; k <= 3; ++k) {
        const GlobalSystem s = assemble(mesh, k, field);
        const SparseMatrix bsum = s.B.aa + SparseMatrix(s.B.aa.transpose());
        EXPECT_LE(max_abs(bsum), 1e-12);
        EXPECT_LE(max_abs(s.M1.aa - SparseMatrix(s.M1.aa.transpose())), 1e-14 * max_abs(s.M1.aa));
        EXPECT_LE(max_abs(s.M2.aa - SparseMatrix(s.M2.aa.transpose())), 1e-14 * max_abs(s.M2.aa));
        for (const SparseMatrix& m : {s.M1.aa, s.M2.aa, SparseMatrix(s.M1.aa + s.M2.aa)}) {
          Eigen::SimplicialLLT<SparseMatrix> llt(m);
          EXPECT_EQ(llt.info(), Eigen::Success) << name << " k=" << k;
        }
      }
    }
  }
}

TEST(Assembly, ThreadCountDoesNotChangeTheMatrices) {
  const PolyMesh mesh = generate_voronoi_mesh(40, 1, 2);
  const CoefficientField field = make_problem("example1");
  const GlobalSystem a = assemble(mesh, 2, field);
  setenv("SOBVEM_THREADS", "3", 1);
  const GlobalSystem b = assemble(mesh, 2, field);
  unsetenv("SOBVEM_THREADS");
  EXPECT_EQ(max_abs(a.A.full - b.A.full), 0.0);
  EXPECT_EQ(max_abs(a.M2.full - b.M2.full), 0.0);
}

TEST(Dirichlet, PolynomialBoundaryValuesAreExact) {
  const CoefficientField field = affine_in_time_quadratic();
  const GlobalSystem s = assemble(generate_distorted_square_mesh(4, 0.3, 3), 2, field);
  const Eigen::VectorXd g = s.dirichlet(0.5);
  ASSERT_EQ(g.size(), s.dofs.num_boundary());
  for (int i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(g(i), field.u_exact(s.dofs.points[s.dofs.boundary[i]], 0.5), 1e-15);
  }
}

TEST(InitialProjection, ZeroDatumGivesZero) {
  const GlobalSystem s = assemble(generate_concave_mesh(2), 2, make_problem("example1"));
  EXPECT_EQ(project_initial(s).norm(), 0.0);
}

TEST(InitialProjection, ReproducesPolynomials) {
  const CoefficientField field = affine_in_time_quadratic();
  for (int k = 2; k <= 3; ++k) {
    const GlobalSystem s = assemble(generate_voronoi_mesh(20, 2, 4), k, field);
    const Eigen::VectorXd u0 = project_initial(s);
    const Eigen::VectorXd ref = interpolate_global(s, field.u0);
    EXPECT_LT((u0 - ref).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(InitialProjection, FallsBackToInterpolationWithoutAGradient) {
  CoefficientField field = affine_in_time_quadratic();
  field.grad_u0 = nullptr;
  const GlobalSystem s = assemble(generate_square_mesh(3), 2, field);
  EXPECT_EQ((project_initial(s) - interpolate_global(s, field.u0)).norm(), 0.0);
}

TEST(TimeStepping, ZeroProblemStaysZero) {
  const GlobalSystem s = assemble(generate_distorted_square_mesh(4, 0.2, 1), 2, make_problem("zero"));
  const Eigen::VectorXd u = BackwardEuler(s, coarse_time(0.1, 1.0)).run(project_initial(s));
  EXPECT_EQ(u.norm(), 0.0);
}

TEST(TimeStepping, PatchTestIsExact) {
  for (int k = 1; k <= 3; ++k) {
    const CoefficientField field = make_problem("patch" + std::to_string(k));
    const SolveOutput out =
        solve_on_mesh(generate_distorted_square_mesh(4, 0.3, 1), field, k, coarse_time(0.1, 1.0));
    EXPECT_LE(out.errors.E0, 1e-8) << "k=" << k;
    EXPECT_LE(out.errors.E1, 1e-8) << "k=" << k;
  }
}

TEST(TimeStepping, AffineInTimeWithNonzeroInitialState) {
  const CoefficientField field = affine_in_time_quadratic();
  const SolveOutput out =
      solve_on_mesh(generate_concave_mesh(2), field, 2, coarse_time(0.25, 1.0));
  EXPECT_LE(out.errors.E0, 1e-10);
}

TEST(TimeStepping, EnergyDoesNotGrowWithoutForcing) {
  const CoefficientField field = decaying_problem();
  const GlobalSystem s = assemble(generate_voronoi_mesh(30, 2, 8), 2, field);
  ASSERT_GE(s.min_sigma, 0.0);
  TimeStepperConfig cfg = coarse_time(0.05, 1.0);
  cfg.check_energy = true;
  const BackwardEuler be(s, cfg);
  Eigen::VectorXd u = project_initial(s);
  double e = discrete_energy(s, u);
  EXPECT_GT(e, 0.0);
  for (int n = 1; n <= cfg.num_steps(); ++n) {
    u = be.step(u, n * cfg.tau);
    const double en = discrete_energy(s, u);
    EXPECT_LE(en, e * (1.0 + 1e-12)) << "step " << n;
    e = en;
  }
  EXPECT_NO_THROW(be.run(project_initial(s)));
}

TEST(TimeStepping, FactorizationReuseMatchesAFreshSolve) {
  const CoefficientField field = make_problem("example1");
  const GlobalSystem s = assemble(generate_distorted_square_mesh(8, 0.2, 1), 2, field);
  const Eigen::VectorXd u0 = project_initial(s);
  const BackwardEuler be(s, coarse_time(0.01, 0.02));
  const Eigen::VectorXd reused = be.step(be.step(u0, 0.01), 0.02);
  const Eigen::VectorXd fresh =
      backward_euler_step(s, backward_euler_step(s, u0, 0.01, 0.01), 0.02, 0.01);
  EXPECT_LT((reused - fresh).norm(), 1e-10 * fresh.norm());
  EXPECT_LE(be.solver().last_residual(), 1e-12);
}

TEST(TimeStepping, RerunsAreBitwiseIdentical) {
  const CoefficientField field = make_problem("example2");
  const PolyMesh mesh = generate_concave_mesh(2);
  const SolveOutput a = solve_on_mesh(mesh, field, 3, coarse_time(0.1, 1.0));
  const SolveOutput b = solve_on_mesh(mesh, field, 3, coarse_time(0.1, 1.0));
  ASSERT_EQ(a.U.size(), b.U.size());
  for (int i = 0; i < a.U.size(); ++i) EXPECT_EQ(a.U(i), b.U(i));
  EXPECT_EQ(a.errors.E0, b.errors.E0);
}

TEST(TimeStepping, StepCountMustBeIntegral) {
  EXPECT_EQ(coarse_time(1e-3, 1.0).num_steps(), 1000);
  EXPECT_EQ(coarse_time(0.1, 0.3).num_steps(), 3);
  EXPECT_THROW(coarse_time(0.3, 1.0).num_steps(), std::invalid_argument);
  EXPECT_THROW(coarse_time(0.0, 1.0).num_steps(), std::invalid_argument);
}

TEST(LinearSolver, SmallSystems) {
  SparseMatrix eye(3, 3);
  eye.setIdentity();
  const Eigen::Vector3d b(1, -2, 3);
  EXPECT_EQ(solve_linear(eye, b), Eigen::VectorXd(b));
  SparseMatrix a(2, 2);
  a.insert(0, 0) = 4;
  a.insert(0, 1) = 1;
  a.insert(1, 0) = 2;
  a.insert(1, 1) = 3;
  const Eigen::VectorXd x = solve_linear(a, Eigen::Vector2d(1, 2));
  EXPECT_NEAR(x(0), 0.1, 1e-15);
  EXPECT_NEAR(x(1), 0.6, 1e-15);
  EXPECT_EQ(solve_linear(a, Eigen::Vector2d::Zero()).norm(), 0.0);
}

TEST(LinearSolver, RandomSpdResidual) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 50;
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = u(rng);
  const Eigen::MatrixXd spd = r * r.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  const SparseMatrix a = spd.sparseView();
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = u(rng);
  LinearSolver solver(a);
  const Eigen::VectorXd x = solver.solve(b);
  EXPECT_LE((a * x - b).norm() / b.norm(), 1e-12);
  EXPECT_LE(solver.last_residual(), 1e-12);
}

TEST(LinearSolver, FailuresAreReported) {
  SparseMatrix rect(2, 3);
  EXPECT_THROW(LinearSolver{rect}, SolverError);
  SparseMatrix singular(2, 2);
  singular.insert(0, 0) = 1;
  singular.insert(0, 1) = 1;
  singular.insert(1, 0) = 1;
  singular.insert(1, 1) = 1;
  EXPECT_THROW(solve_linear(singular, Eigen::Vector2d(1, 0)), SolverError);
}

TEST(Snapshots, SolutionRoundTrip) {
  Eigen::VectorXd u(4);
  u << 1.0, -2.5e-17, 3.141592653589793, 1e300;
  const std::string path = ::testing::TempDir() + "/solution.txt";
  write_solution(path, u);
  EXPECT_EQ(read_solution(path), u);
  EXPECT_THROW(read_solution(::testing::TempDir() + "/missing.txt"), std::runtime_error);
}

TEST(Snapshots, CellPolynomialFile) {
  const CoefficientField field = affine_in_time_quadratic();
  const GlobalSystem s = assemble(generate_square_mesh(2), 2, field);
  const Eigen::VectorXd u = interpolate_global(s, field.u0);
  const std::string path = ::testing::TempDir() + "/cells.txt";
  write_cell_polynomials(path, s, u);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "cellpoly 1");
  std::getline(in, line);
  EXPECT_EQ(line, "order 2");
  std::getline(in, line);
  EXPECT_EQ(line, "cells 4");
  // first cell: value at its centre from the stored coefficients
  std::getline(in, line);
  std::istringstream row(line);
  int nk = 0;
  double xc = 0, yc = 0, hk = 0;
  row >> nk >> xc >> yc >> hk;
  ASSERT_EQ(nk, 6);
  double c0 = 0;
  row >> c0;
  EXPECT_NEAR(c0, field.u0(Point(xc, yc)), 1e-12);
}
