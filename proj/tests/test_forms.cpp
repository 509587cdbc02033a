#include "sobvem/forms.hpp"
#include "sobvem/problems.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace sobvem;
using sobvem::testing::Poly;

namespace {

// High-order integral over a cell: every fan triangle split into four
// midpoint children with an order-10 rule on each.
double subdivided_integral(const std::vector<Point>& loop,
                           const std::function<double(const Point&)>& g) {
  const TriangleRule& r = triangle_rule(10);
  double s = 0.0;
  for (const auto& t : triangulate_polygon(loop)) {
    const Point m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
    const std::array<std::array<Point, 3>, 4> kids{{{t[0], m01, m20},
                                                    {m01, t[1], m12},
                                                    {m20, m12, t[2]},
                                                    {m01, m12, m20}}};
    for (const auto& k : kids) {
      const double area = signed_area({k[0], k[1], k[2]});
      for (std::size_t q = 0; q < r.weights.size(); ++q) {
        const auto& b = r.points[q];
        s += area * r.weights[q] * g(b[0] * k[0] + b[1] * k[1] + b[2] * k[2]);
      }
    }
  }
  return s;
}

VectorXd random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

} // namespace

TEST(Constants, ExampleOneAtTheCentre) {
  const CoefficientField f = make_problem("example1");
  const CellGeometry g = compute_polygon_geometry({{0.4, 0.4}, {0.6, 0.4}, {0.6, 0.6}, {0.4, 0.6}});
  const LocalConstants c = constant_coefficient_approx(g, f);
  EXPECT_NEAR(c.mu, 2.0, 1e-14);
  EXPECT_NEAR(c.eps, 0.75, 1e-14);
  EXPECT_NEAR(c.sigma, 0.0, 1e-14);
}

TEST(Constants, IdentityAndSmallDiffusion) {
  const CellGeometry g = compute_polygon_geometry({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const LocalConstants c2 = constant_coefficient_approx(g, make_problem("example2"));
  EXPECT_NEAR(c2.mu, 1.0, 1e-15);
  EXPECT_NEAR(c2.eps, 1e-6, 1e-20);
  EXPECT_NEAR(c2.sigma, 1.0, 1e-15);
}

TEST(Constants, NegativeSigmaIsClipped) {
  const CoefficientField f = make_problem("example1");
  const CellGeometry g = compute_polygon_geometry({{0, 0}, {0.1, 0}, {0.1, 0.1}, {0, 0.1}});
  EXPECT_LT(f.sigma(g.centroid), 0.0);
  EXPECT_EQ(constant_coefficient_approx(g, f).sigma, 0.0);
}

TEST(Stabilization, VanishesOnPolynomials) {
  std::mt19937_64 rng(1);
  const CoefficientField field = make_problem("example1");
  for (const PolyMesh& mesh : sobvem::testing::sample_meshes()) {
    for (int k = 1; k <= 3; ++k) {
      for (int c = 0; c < mesh.num_cells(); c += 3) {
        const LocalElement el = build_local_element(mesh, c, k);
        const Stabilizations s =
            build_stabilizations(el, constant_coefficient_approx(el.geometry, field));
        const Poly p = sobvem::testing::random_poly(k, rng);
        const VectorXd dofs = interpolate(el, p);
        EXPECT_LT((s.S1 * dofs).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((s.S2 * dofs).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((s.S3 * dofs).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(Stabilization, PositiveSemidefiniteAndNontrivial) {
  std::mt19937_64 rng(2);
  const CoefficientField field = make_problem("example3");
  for (const PolyMesh& mesh : sobvem::testing::sample_meshes()) {
    for (int k = 1; k <= 3; ++k) {
      const LocalElement el = build_local_element(mesh, 0, k);
      const Stabilizations s =
          build_stabilizations(el, constant_coefficient_approx(el.geometry, field));
      for (int trial = 0; trial < 100; ++trial) {
        const VectorXd w = random_vector(el.num_dofs(), rng);
        EXPECT_GE(w.dot(s.S1 * w), -1e-14);
        EXPECT_GE(w.dot(s.S2 * w), -1e-14);
        EXPECT_GE(w.dot(s.S3 * w), -1e-14);
      }
      EXPECT_GT(s.S1.norm(), 0.0);
    }
  }
  const LocalElement sq = build_local_element(generate_square_mesh(1), 0, 1);
  const Stabilizations s = build_stabilizations(sq, {1.0, 1.0, 0.0});
  const VectorXd w = random_vector(4, rng);
  EXPECT_GT(w.dot(s.S1 * w), 0.0);
}

TEST(Stabilization, MassStabilizationScalesWithArea) {
  std::vector<Point> loop{{0, 0}, {0.3, 0.05}, {0.35, 0.3}, {0.1, 0.4}, {-0.05, 0.2}};
  std::vector<Point> big;
  for (const Point& p : loop) big.push_back(2.0 * p);
  for (int k = 1; k <= 3; ++k) {
    const LocalConstants c{1.0, 1.0, 1.0};
    const MatrixXd s_small = build_stabilizations(build_local_element(compute_polygon_geometry(loop), k), c).S1;
    const MatrixXd s_big = build_stabilizations(build_local_element(compute_polygon_geometry(big), k), c).S1;
    EXPECT_LT((s_big - 4.0 * s_small).cwiseAbs().maxCoeff(), 1e-12 * s_big.cwiseAbs().maxCoeff());
  }
}

TEST(LocalForms, ConvectionIsSkewSymmetric) {
  std::mt19937_64 rng(4);
  for (const std::string name : {"example1", "example2", "example3"}) {
    const CoefficientField field = make_problem(name);
    for (const PolyMesh& mesh : sobvem::testing::sample_meshes()) {
      for (int k = 1; k <= 3; ++k) {
        const LocalForms f = build_local_forms(build_local_element(mesh, 1, k), field);
        EXPECT_EQ((f.B + f.B.transpose()).cwiseAbs().maxCoeff(), 0.0);
        const VectorXd w = random_vector(f.B.rows(), rng);
        EXPECT_NEAR(w.dot(f.B * w), 0.0, 1e-14);
      }
    }
  }
}

TEST(LocalForms, SymmetricPositiveDefiniteMassForms) {
  const CoefficientField field = make_problem("example1");
  for (const PolyMesh& mesh : sobvem::testing::sample_meshes()) {
    for (int k = 1; k <= 3; ++k) {
      const LocalForms f = build_local_forms(build_local_element(mesh, 2, k), field);
      EXPECT_LE((f.M1 - f.M1.transpose()).cwiseAbs().maxCoeff(), 1e-14 * f.M1.cwiseAbs().maxCoeff());
      EXPECT_LE((f.M2 - f.M2.transpose()).cwiseAbs().maxCoeff(), 1e-14 * f.M2.cwiseAbs().maxCoeff());
      EXPECT_LE((f.A - f.A.transpose()).cwiseAbs().maxCoeff(), 1e-14 * f.A.cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<MatrixXd> e1(f.M1);
      EXPECT_GT(e1.eigenvalues().minCoeff(), 0.0);
      // M2 is singular on constants only
      Eigen::SelfAdjointEigenSolver<MatrixXd> e2(f.M2);
      EXPECT_GT(e2.eigenvalues()(1), 0.0);
      EXPECT_LT(std::abs(e2.eigenvalues()(0)), 1e-12 * e2.eigenvalues().maxCoeff());
    }
  }
}

TEST(LocalForms, PolynomialConsistencyWithVariableCoefficients) {
  // For polynomial arguments the stabilizations vanish and every form is the
  // exact integral: the coefficients of example1 are at most quadratic.
  std::mt19937_64 rng(6);
  const CoefficientField field = make_problem("example1");
  for (const PolyMesh& mesh : sobvem::testing::sample_meshes()) {
    for (int k = 1; k <= 3; ++k) {
      const int c = mesh.num_cells() / 2;
      const LocalElement el = build_local_element(mesh, c, k);
      const LocalForms f = build_local_forms(el, field);
      const Poly p = sobvem::testing::random_poly(k, rng);
      const Poly q = sobvem::testing::random_poly(k, rng);
      const VectorXd dp = interpolate(el, p);
      const VectorXd dq = interpolate(el, q);
      const auto& loop = el.geometry.vertices;
      const double m1 = subdivided_integral(loop, [&](const Point& x) { return p(x) * q(x); });
      const double m2 = subdivided_integral(
          loop, [&](const Point& x) { return q.grad(x).dot(field.mu(x) * p.grad(x)); });
      const double a = subdivided_integral(loop, [&](const Point& x) {
        return q.grad(x).dot(field.eps(x) * p.grad(x)) + field.sigma(x) * p(x) * q(x);
      });
      const double b = subdivided_integral(loop, [&](const Point& x) {
        return 0.5 * (field.beta(x).dot(p.grad(x)) * q(x) - field.beta(x).dot(q.grad(x)) * p(x));
      });
      EXPECT_NEAR(dq.dot(f.M1 * dp), m1, 1e-12) << "k=" << k;
      EXPECT_NEAR(dq.dot(f.M2 * dp), m2, 1e-12) << "k=" << k;
      EXPECT_NEAR(dq.dot(f.A * dp), a, 1e-12) << "k=" << k;
      EXPECT_NEAR(dq.dot(f.B * dp), b, 1e-12) << "k=" << k;
    }
  }
}

TEST(LocalForms, RejectsInvalidCoefficients) {
  const LocalElement el = build_local_element(generate_square_mesh(1), 0, 1);
  CoefficientField field = make_problem("example3");
  CoefficientField bad_mu = field;
  bad_mu.mu = [](const Point&) { return Matrix2(Matrix2::Identity() * -1.0); };
  EXPECT_THROW(build_local_forms(el, bad_mu), CoefficientError);
  CoefficientField nonsym = field;
  nonsym.eps = [](const Point&) { return Matrix2((Matrix2() << 1.0, 2.0, 0.0, 1.0).finished()); };
  EXPECT_THROW(build_local_forms(el, nonsym), CoefficientError);
  CoefficientField nan_gamma = field;
  nan_gamma.gamma = [](const Point&) { return std::nan(""); };
  EXPECT_THROW(build_local_forms(el, nan_gamma), CoefficientError);
}

TEST(LocalLoad, ZeroAndUnitSources) {
  const LocalElement el = build_local_element(generate_square_mesh(1), 0, 1);
  EXPECT_EQ(build_local_load(el, [](const Point&, double) { return 0.0; }, 0.0).norm(), 0.0);
  const VectorXd one = build_local_load(el, [](const Point&, double) { return 1.0; }, 0.0);
  EXPECT_NEAR(one.sum(), 1.0, 1e-15);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(one(i), 0.25, 1e-15);
}

TEST(LocalLoad, MatchesASubdividedOracle) {
  const CoefficientField field = make_problem("example1");
  const PolyMesh mesh = generate_distorted_square_mesh(32, 0.2, 1);
  const int c = mesh.num_cells() / 2 + 7;
  for (int k = 1; k <= 3; ++k) {
    const LocalElement el = build_local_element(mesh, c, k);
    const VectorXd load = build_local_load(el, field.f, 1.0);
    for (int j = 0; j < el.num_dofs(); ++j) {
      const VectorXd coeffs = el.proj.pi0.col(j);
      const double oracle = subdivided_integral(el.geometry.vertices, [&](const Point& x) {
        return field.f(x, 1.0) * el.basis.evaluate(coeffs, x);
      });
      EXPECT_NEAR(load(j), oracle, 1e-10) << "k=" << k << " dof " << j;
    }
  }
}

TEST(Problems, SourceMatchesAFiniteDifferenceResidual) {
  // f = u_t - div(mu grad u_t + eps grad u) + beta . grad u + gamma u with
  // the divergence and the time derivative taken by central differences.
  const double d = 1e-4;
  for (const std::string name : {"example1", "example2", "example3", "patch3", "temporal"}) {
    const CoefficientField f = make_problem(name);
    for (const Point x : {Point(0.3, 0.7), Point(0.52, 0.48), Point(0.81, 0.15)}) {
      const double t = 0.6;
      auto flux = [&](const Point& y) -> Point {
        const Point gt = (f.grad_u_exact(y, t + d) - f.grad_u_exact(y, t - d)) / (2.0 * d);
        return f.mu(y) * gt + f.eps(y) * f.grad_u_exact(y, t);
      };
      const double div = (flux(x + Point(d, 0)).x() - flux(x - Point(d, 0)).x() +
                          flux(x + Point(0, d)).y() - flux(x - Point(0, d)).y()) /
                         (2.0 * d);
      const double ut = (f.u_exact(x, t + d) - f.u_exact(x, t - d)) / (2.0 * d);
      const double r = ut - div + f.beta(x).dot(f.grad_u_exact(x, t)) + f.gamma(x) * f.u_exact(x, t);
      EXPECT_NEAR(f.f(x, t), r, 1e-5 * std::max(1.0, std::abs(r))) << name;
      EXPECT_EQ(f.g(x, t), f.u_exact(x, t));
      EXPECT_NEAR(f.u0(x), f.u_exact(x, 0.0), 1e-15);
    }
  }
}

TEST(Problems, CatalogueNames) {
  for (const auto& name : problem_names()) {
    EXPECT_NO_THROW(make_problem(name)) << name;
  }
  EXPECT_EQ(make_problem("2").name, "example2");
  EXPECT_THROW(make_problem("example9"), std::invalid_argument);
  const CoefficientField zero = make_problem("zero");
  ASSERT_TRUE(zero.has_exact_solution());
  EXPECT_EQ(zero.u_exact(Point(0.5, 0.5), 1.0), 0.0);
}
