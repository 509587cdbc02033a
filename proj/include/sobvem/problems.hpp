#pragma once

#include "sobvem/forms.hpp"

#include <string>
#include <vector>

namespace sobvem {

/// Spatial factor S of a separable solution u = theta(t) S(x).
struct SpatialProfile {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<Matrix2(const Point&)> hessian;
};

struct TimeProfile {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Matrix coefficient with its row-wise divergence (sum_i d_i a_ij)_j.
struct MatrixCoefficient {
  std::function<Matrix2(const Point&)> value;
  std::function<Point(const Point&)> divergence;
};

struct ManufacturedSpec {
  std::string name;
  MatrixCoefficient mu;
  MatrixCoefficient eps;
  std::function<Point(const Point&)> beta;
  std::function<double(const Point&)> div_beta;
  std::function<double(const Point&)> gamma;
  SpatialProfile solution;
  TimeProfile theta;
};

/// Coefficient field whose exact solution is theta(t) S(x); f, u0, the
/// Dirichlet trace and the exact-solution callbacks are derived from it.
CoefficientField make_manufactured(const ManufacturedSpec& spec);

/// Named problems: example1, example2, example3, zero, patch1..patch3
/// (u = t p with p of degree 1..3, constant anisotropic coefficients) and
/// temporal (u = t^2 sin(pi x) sin(pi y) with the example1 coefficients).
/// "1", "2" and "3" alias the examples. Throws std::invalid_argument for
/// unknown names.
CoefficientField make_problem(const std::string& name);

std::vector<std::string> problem_names();

} // namespace sobvem
