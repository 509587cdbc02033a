#pragma once

#include "sobvem/quadrature.hpp"
#include "sobvem/vem_local.hpp"

#include <functional>
#include <stdexcept>
#include <string>

namespace sobvem {

using Matrix2 = Eigen::Matrix2d;

class CoefficientError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Data of u_t - div(mu grad u_t + eps grad u) + beta . grad u + gamma u = f.
/// Optional callbacks may be left empty.
struct CoefficientField {
  std::string name;
  std::function<Matrix2(const Point&)> mu;
  std::function<Matrix2(const Point&)> eps;
  std::function<Point(const Point&)> beta;
  std::function<double(const Point&)> div_beta;
  std::function<double(const Point&)> gamma;
  std::function<double(const Point&, double)> f;
  std::function<double(const Point&)> u0;
  std::function<Point(const Point&)> grad_u0;                 // optional
  std::function<double(const Point&, double)> g;              // Dirichlet trace
  std::function<double(const Point&, double)> u_exact;        // optional
  std::function<Point(const Point&, double)> grad_u_exact;    // optional

  /// Effective reaction gamma - div(beta)/2.
  double sigma(const Point& x) const { return gamma(x) - 0.5 * div_beta(x); }
  bool has_exact_solution() const { return u_exact && grad_u_exact; }
};

struct LocalConstants {
  double mu = 0.0;
  double eps = 0.0;
  double sigma = 0.0;
};

/// Half traces of mu and eps and the clipped sigma at the cell centroid.
LocalConstants constant_coefficient_approx(const CellGeometry& geometry,
                                           const CoefficientField& field);

struct Stabilizations {
  MatrixXd S1;
  MatrixXd S2;
  MatrixXd S3;
};

/// Weight of S3: eps_K + sigma_K |K|.
inline double s3_weight(const LocalConstants& c, double area) { return c.eps + c.sigma * area; }

/// dofi-dofi stabilizations on the kernel of Pi0_k.
Stabilizations build_stabilizations(const LocalElement& element, const LocalConstants& constants);

/// Pi0_k phi_i and Pi0_{k-1} grad phi_i sampled at the points of a cell rule.
/// Column q of each matrix belongs to quadrature point q.
struct ProjectedBasis {
  PolygonRule rule;
  MatrixXd values;  // N x nq
  MatrixXd grad_x;  // N x nq
  MatrixXd grad_y;  // N x nq
};

ProjectedBasis evaluate_projected_basis(const LocalElement& element, int order);

struct LocalForms {
  MatrixXd M1;
  MatrixXd M2;
  MatrixXd A;
  MatrixXd B;  // B(i, j) = b_h(phi_j, phi_i)
  LocalConstants constants;
  double min_sigma = 0.0;  // smallest sigma over the quadrature points
};

/// Quadrature order used for coefficient-weighted cell integrals.
inline int form_quadrature_order(int k) { return 2 * k + 2; }

/// Throws CoefficientError if mu or eps is not symmetric positive definite
/// at a quadrature point, or a coefficient is not finite.
LocalForms build_local_forms(const LocalElement& element, const CoefficientField& field);
LocalForms build_local_forms(const LocalElement& element, const ProjectedBasis& basis,
                             const CoefficientField& field);

/// load_i = (f(., t), Pi0_k phi_i)_K.
VectorXd build_local_load(const LocalElement& element,
                          const std::function<double(const Point&, double)>& f, double t);
VectorXd build_local_load(const ProjectedBasis& basis,
                          const std::function<double(const Point&, double)>& f, double t);

} // namespace sobvem
