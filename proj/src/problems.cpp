#include "sobvem/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sobvem {

namespace {

using std::numbers::pi;

MatrixCoefficient constant_matrix(const Matrix2& m) {
  return {[m](const Point&) { return m; }, [](const Point&) { return Point(0.0, 0.0); }};
}

MatrixCoefficient scalar_matrix(std::function<double(const Point&)> a,
                                std::function<Point(const Point&)> grad_a) {
  return {[a](const Point& x) { return Matrix2(a(x) * Matrix2::Identity()); },
          std::move(grad_a)};
}

TimeProfile linear_in_time() {
  return {[](double t) { return t; }, [](double) { return 1.0; }};
}

SpatialProfile sine_bump() {
  return {[](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); },
          [](const Point& x) {
            return Point(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()),
                         pi * std::sin(pi * x.x()) * std::cos(pi * x.y()));
          },
          [](const Point& x) {
            const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
            const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
            Matrix2 h;
            h << -pi * pi * sx * sy, pi * pi * cx * cy, pi * pi * cx * cy, -pi * pi * sx * sy;
            return h;
          }};
}

ManufacturedSpec example1_spec() {
  ManufacturedSpec s;
  s.name = "example1";
  s.mu = scalar_matrix([](const Point& x) { return x.x() + x.y() + 1.0; },
                       [](const Point&) { return Point(1.0, 1.0); });
  s.eps = scalar_matrix([](const Point& x) { return x.x() * x.x() + x.y(); },
                        [](const Point& x) { return Point(2.0 * x.x(), 1.0); });
  s.beta = [](const Point& x) { return x; };
  s.div_beta = [](const Point&) { return 2.0; };
  s.gamma = [](const Point& x) { return x.x() + x.y(); };
  s.solution = sine_bump();
  s.theta = linear_in_time();
  return s;
}

ManufacturedSpec example2_spec() {
  ManufacturedSpec s;
  s.name = "example2";
  s.mu = constant_matrix(Matrix2::Identity());
  s.eps = constant_matrix(1e-6 * Matrix2::Identity());
  s.beta = [](const Point&) { return Point(10.0, 10.0); };
  s.div_beta = [](const Point&) { return 0.0; };
  s.gamma = [](const Point&) { return 1.0; };
  s.solution = {[](const Point& x) { return std::exp(x.x() + x.y()); },
                [](const Point& x) {
                  const double e = std::exp(x.x() + x.y());
                  return Point(e, e);
                },
                [](const Point& x) { return Matrix2(std::exp(x.x() + x.y()) * Matrix2::Ones()); }};
  s.theta = linear_in_time();
  return s;
}

ManufacturedSpec example3_spec() {
  ManufacturedSpec s;
  s.name = "example3";
  s.mu = constant_matrix(Matrix2::Identity());
  s.eps = constant_matrix(Matrix2::Identity());
  s.beta = [](const Point&) { return Point(1.0, 1.0); };
  s.div_beta = [](const Point&) { return 0.0; };
  s.gamma = [](const Point&) { return 1.0; };
  const Point c(0.5, 0.5);
  s.solution = {[c](const Point& x) { return std::exp(-100.0 * (x - c).squaredNorm()); },
                [c](const Point& x) {
                  const Point d = x - c;
                  return Point(-200.0 * std::exp(-100.0 * d.squaredNorm()) * d);
                },
                [c](const Point& x) {
                  const Point d = x - c;
                  const double e = std::exp(-100.0 * d.squaredNorm());
                  return Matrix2(e * (40000.0 * d * d.transpose() - 200.0 * Matrix2::Identity()));
                }};
  s.theta = linear_in_time();
  return s;
}

// p(x, y) = sum c_ab x^a y^b with explicit derivatives.
struct Poly {
  std::vector<std::array<int, 2>> exps;
  std::vector<double> coeffs;

  static double pw(double v, int e) { return e <= 0 ? 1.0 : std::pow(v, e); }

  double value(const Point& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < exps.size(); ++i) {
      s += coeffs[i] * pw(x.x(), exps[i][0]) * pw(x.y(), exps[i][1]);
    }
    return s;
  }
  Point grad(const Point& x) const {
    Point g(0.0, 0.0);
    for (std::size_t i = 0; i < exps.size(); ++i) {
      const auto [a, b] = exps[i];
      if (a > 0) g.x() += coeffs[i] * a * pw(x.x(), a - 1) * pw(x.y(), b);
      if (b > 0) g.y() += coeffs[i] * b * pw(x.x(), a) * pw(x.y(), b - 1);
    }
    return g;
  }
  Matrix2 hess(const Point& x) const {
    Matrix2 h = Matrix2::Zero();
    for (std::size_t i = 0; i < exps.size(); ++i) {
      const auto [a, b] = exps[i];
      const double c = coeffs[i];
      if (a > 1) h(0, 0) += c * a * (a - 1) * pw(x.x(), a - 2) * pw(x.y(), b);
      if (b > 1) h(1, 1) += c * b * (b - 1) * pw(x.x(), a) * pw(x.y(), b - 2);
      if (a > 0 && b > 0) {
        const double v = c * a * b * pw(x.x(), a - 1) * pw(x.y(), b - 1);
        h(0, 1) += v;
        h(1, 0) += v;
      }
    }
    return h;
  }
};

ManufacturedSpec patch_spec(int degree) {
  Poly p;
  p.exps = {{0, 0}, {1, 0}, {0, 1}};
  p.coeffs = {1.0, 2.0, -1.0};
  if (degree >= 2) {
    p.exps.insert(p.exps.end(), {{2, 0}, {1, 1}, {0, 2}});
    p.coeffs.insert(p.coeffs.end(), {1.0, -0.5, 2.0});
  }
  if (degree >= 3) {
    p.exps.insert(p.exps.end(), {{3, 0}, {2, 1}, {1, 2}, {0, 3}});
    p.coeffs.insert(p.coeffs.end(), {1.0, -2.0, 0.5, -1.0});
  }
  ManufacturedSpec s;
  s.name = "patch" + std::to_string(degree);
  Matrix2 mu, eps;
  mu << 2.0, 0.5, 0.5, 1.0;
  eps << 1.0, -0.3, -0.3, 0.8;
  s.mu = constant_matrix(mu);
  s.eps = constant_matrix(eps);
  s.beta = [](const Point&) { return Point(0.0, 0.0); };
  s.div_beta = [](const Point&) { return 0.0; };
  s.gamma = [](const Point&) { return 0.5; };
  s.solution = {[p](const Point& x) { return p.value(x); },
                [p](const Point& x) { return p.grad(x); },
                [p](const Point& x) { return p.hess(x); }};
  s.theta = linear_in_time();
  return s;
}

CoefficientField zero_problem() {
  CoefficientField f;
  f.name = "zero";
  f.mu = [](const Point&) { return Matrix2(Matrix2::Identity()); };
  f.eps = f.mu;
  f.beta = [](const Point&) { return Point(0.0, 0.0); };
  f.div_beta = [](const Point&) { return 0.0; };
  f.gamma = [](const Point&) { return 0.0; };
  f.f = [](const Point&, double) { return 0.0; };
  f.u0 = [](const Point&) { return 0.0; };
  f.grad_u0 = [](const Point&) { return Point(0.0, 0.0); };
  f.g = f.f;
  f.u_exact = f.f;
  f.grad_u_exact = [](const Point&, double) { return Point(0.0, 0.0); };
  return f;
}

} // namespace

CoefficientField make_manufactured(const ManufacturedSpec& s) {
  CoefficientField f;
  f.name = s.name;
  f.mu = s.mu.value;
  f.eps = s.eps.value;
  f.beta = s.beta;
  f.div_beta = s.div_beta;
  f.gamma = s.gamma;
  f.f = [s](const Point& x, double t) {
    const double S = s.solution.value(x);
    const Point gS = s.solution.gradient(x);
    const Matrix2 hS = s.solution.hessian(x);
    const double div_mu = s.mu.divergence(x).dot(gS) + (s.mu.value(x).cwiseProduct(hS)).sum();
    const double div_eps = s.eps.divergence(x).dot(gS) + (s.eps.value(x).cwiseProduct(hS)).sum();
    const double th = s.theta.value(t);
    return s.theta.derivative(t) * (S - div_mu) - th * div_eps + th * s.beta(x).dot(gS) +
           th * s.gamma(x) * S;
  };
  f.u_exact = [s](const Point& x, double t) { return s.theta.value(t) * s.solution.value(x); };
  f.grad_u_exact = [s](const Point& x, double t) {
    return Point(s.theta.value(t) * s.solution.gradient(x));
  };
  f.g = f.u_exact;
  f.u0 = [s](const Point& x) { return s.theta.value(0.0) * s.solution.value(x); };
  f.grad_u0 = [s](const Point& x) { return Point(s.theta.value(0.0) * s.solution.gradient(x)); };
  return f;
}

CoefficientField make_problem(const std::string& name) {
  if (name == "example1" || name == "1") return make_manufactured(example1_spec());
  if (name == "example2" || name == "2") return make_manufactured(example2_spec());
  if (name == "example3" || name == "3") return make_manufactured(example3_spec());
  if (name == "zero") return zero_problem();
  if (name == "patch1") return make_manufactured(patch_spec(1));
  if (name == "patch2") return make_manufactured(patch_spec(2));
  if (name == "patch3") return make_manufactured(patch_spec(3));
  if (name == "temporal") {
    ManufacturedSpec s = example1_spec();
    s.name = "temporal";
    s.theta = {[](double t) { return t * t; }, [](double t) { return 2.0 * t; }};
    return make_manufactured(s);
  }
  throw std::invalid_argument("unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() {
  return {"example1", "example2", "example3", "zero", "patch1", "patch2", "patch3", "temporal"};
}

} // namespace sobvem
