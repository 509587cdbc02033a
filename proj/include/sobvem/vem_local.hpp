#pragma once

#include "sobvem/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sobvem {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class VemError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

constexpr int kMinOrder = 1;
constexpr int kMaxOrder = 3;

/// Scaled monomials m_a(x) = ((x - x_K) / h_K)^a in graded order
/// 1, x, y, x^2, xy, y^2, ...
class ScaledMonomialBasis {
public:
  ScaledMonomialBasis() = default;
  ScaledMonomialBasis(int order, const Point& center, double diameter);

  static int dimension(int order) { return order < 0 ? 0 : (order + 1) * (order + 2) / 2; }
  /// Position of the exponent (a, b) in graded order.
  static int index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }

  int order() const { return order_; }
  int size() const { return dimension(order_); }
  const Point& center() const { return center_; }
  double diameter() const { return diameter_; }
  const std::vector<std::array<int, 2>>& exponents() const { return exponents_; }

  VectorXd values(const Point& x) const;
  /// Row i holds the gradient of m_i at x.
  Eigen::Matrix<double, Eigen::Dynamic, 2> gradients(const Point& x) const;
  double evaluate(const VectorXd& coeffs, const Point& x) const;

  /// Maps P_order coefficients to P_{order-1} coefficients of d/dx_c.
  MatrixXd derivative_matrix(int component) const;
  /// Maps P_order coefficients to P_{order-2} coefficients of the Laplacian.
  MatrixXd laplacian_matrix() const;

private:
  int order_ = 0;
  Point center_ = Point::Zero();
  double diameter_ = 1.0;
  std::vector<std::array<int, 2>> exponents_;
};

/// Local degrees of freedom of order k: vertex values, k-1 Gauss-Lobatto
/// interior values per edge, and the scaled moments (1/|K|) int w m for
/// m in M_{k-2}.
struct DofLayout {
  struct EdgeNodes {
    std::vector<int> dofs;        // k+1 point DOFs from vertex i to vertex i+1
    std::vector<double> weights;  // physical Gauss-Lobatto weights
    Point normal = Point::Zero();
    double length = 0.0;
  };

  int order = 1;
  int num_vertices = 0;
  std::vector<Point> nodes;  // locations of the point DOFs
  std::vector<EdgeNodes> edges;

  int num_vertex_dofs() const { return num_vertices; }
  int num_edge_dofs() const { return num_vertices * (order - 1); }
  int num_moment_dofs() const { return order * (order - 1) / 2; }
  int num_point_dofs() const { return num_vertices * order; }
  int moment_offset() const { return num_point_dofs(); }
  int size() const { return num_point_dofs() + num_moment_dofs(); }
};

/// Projector matrices of one cell. Coefficient-valued projectors map a DOF
/// vector to scaled-monomial coefficients.
struct LocalProjectors {
  MatrixXd G;            // (grad m_a, grad m_b) with the P0 row, by quadrature
  MatrixXd B;            // right-hand side of the elliptic projection
  MatrixXd D;            // DOFs of the monomials
  MatrixXd H;            // monomial mass matrix (m_a, m_b)
  MatrixXd pi_nabla;     // n_k x N
  MatrixXd pi0;          // n_k x N
  std::array<MatrixXd, 2> pi0_grad;  // n_{k-1} x N per component
};

struct LocalElement {
  int cell = -1;
  CellGeometry geometry;
  ScaledMonomialBasis basis;
  DofLayout layout;
  LocalProjectors proj;

  int num_dofs() const { return layout.size(); }
};

DofLayout build_dof_layout(const CellGeometry& geometry, int k);

/// Fills G, B, D, H and pi_nabla.
void build_pi_nabla(const CellGeometry& geometry, const ScaledMonomialBasis& basis,
                    const DofLayout& layout, LocalProjectors& proj);

/// Fills pi0 through the enhancement constraint; needs pi_nabla.
void build_pi0_k(const CellGeometry& geometry, const ScaledMonomialBasis& basis,
                 const DofLayout& layout, LocalProjectors& proj);

/// Fills pi0_grad (L2 projection of the gradient onto P_{k-1}^2).
void build_pi0_grad(const CellGeometry& geometry, const ScaledMonomialBasis& basis,
                    const DofLayout& layout, LocalProjectors& proj);

LocalElement build_local_element(const PolyMesh& mesh, int c, int k);
LocalElement build_local_element(const CellGeometry& geometry, int k);

using ScalarFunction = std::function<double(const Point&)>;

/// DOF vector of the interpolant of u (point values and quadrature moments).
VectorXd interpolate(const LocalElement& element, const ScalarFunction& u);

/// DOF-space matrix of Pi0_k, i.e. D * pi0.
MatrixXd pi0_dof_matrix(const LocalElement& element);

} // namespace sobvem
