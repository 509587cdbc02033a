#include "sobvem/vem_local.hpp"

#include "sobvem/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace sobvem {

namespace {

constexpr double kConditionLimit = 1e12;

std::string describe(const CellGeometry& g) {
  std::ostringstream os;
  os << "cell with " << g.num_vertices() << " vertices, area " << g.area << ", diameter "
     << g.diameter << ", centroid (" << g.centroid.x() << ", " << g.centroid.y() << ")";
  return os.str();
}

double inverse_condition(const Eigen::PartialPivLU<MatrixXd>& lu) { return lu.rcond(); }

} // namespace

ScaledMonomialBasis::ScaledMonomialBasis(int order, const Point& center, double diameter)
    : order_(order), center_(center), diameter_(diameter) {
  for (int d = 0; d <= order; ++d) {
    for (int b = 0; b <= d; ++b) {
      exponents_.push_back({d - b, b});
    }
  }
}

VectorXd ScaledMonomialBasis::values(const Point& x) const {
  const double sx = (x.x() - center_.x()) / diameter_;
  const double sy = (x.y() - center_.y()) / diameter_;
  VectorXd v(size());
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = exponents_[i];
    v[i] = std::pow(sx, a) * std::pow(sy, b);
  }
  return v;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> ScaledMonomialBasis::gradients(const Point& x) const {
  const double sx = (x.x() - center_.x()) / diameter_;
  const double sy = (x.y() - center_.y()) / diameter_;
  Eigen::Matrix<double, Eigen::Dynamic, 2> g(size(), 2);
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = exponents_[i];
    g(i, 0) = a == 0 ? 0.0 : a * std::pow(sx, a - 1) * std::pow(sy, b) / diameter_;
    g(i, 1) = b == 0 ? 0.0 : b * std::pow(sx, a) * std::pow(sy, b - 1) / diameter_;
  }
  return g;
}

double ScaledMonomialBasis::evaluate(const VectorXd& coeffs, const Point& x) const {
  return values(x).dot(coeffs);
}

MatrixXd ScaledMonomialBasis::derivative_matrix(int component) const {
  MatrixXd d = MatrixXd::Zero(dimension(order_ - 1), size());
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = exponents_[i];
    if (component == 0 && a > 0) {
      d(index(a - 1, b), i) = a / diameter_;
    } else if (component == 1 && b > 0) {
      d(index(a, b - 1), i) = b / diameter_;
    }
  }
  return d;
}

MatrixXd ScaledMonomialBasis::laplacian_matrix() const {
  MatrixXd l = MatrixXd::Zero(dimension(order_ - 2), size());
  const double h2 = diameter_ * diameter_;
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = exponents_[i];
    if (a >= 2) {
      l(index(a - 2, b), i) += a * (a - 1) / h2;
    }
    if (b >= 2) {
      l(index(a, b - 2), i) += b * (b - 1) / h2;
    }
  }
  return l;
}

DofLayout build_dof_layout(const CellGeometry& geometry, int k) {
  if (k < kMinOrder || k > kMaxOrder) {
    throw VemError("unsupported VEM order k = " + std::to_string(k) + " (supported: 1..3)");
  }
  DofLayout layout;
  layout.order = k;
  layout.num_vertices = geometry.num_vertices();
  const int n = layout.num_vertices;
  layout.nodes = geometry.vertices;
  layout.edges.resize(n);
  for (int i = 0; i < n; ++i) {
    const Point& a = geometry.vertices[i];
    const Point& b = geometry.vertices[(i + 1) % n];
    const EdgeRule rule = edge_gauss_lobatto(a, b, k + 1);
    auto& e = layout.edges[i];
    e.normal = geometry.edge_normals[i];
    e.length = geometry.edge_lengths[i];
    e.weights = rule.weights;
    e.dofs.push_back(i);
    for (int j = 1; j < k; ++j) {
      e.dofs.push_back(static_cast<int>(layout.nodes.size()));
      layout.nodes.push_back(rule.points[j]);
    }
    e.dofs.push_back((i + 1) % n);
  }
  return layout;
}

void build_pi_nabla(const CellGeometry& geometry, const ScaledMonomialBasis& basis,
                    const DofLayout& layout, LocalProjectors& proj) {
  const int k = layout.order;
  const int nk = basis.size();
  const int ndof = layout.size();
  const int mom = layout.moment_offset();
  const double area = geometry.area;

  const PolygonRule rule = polygon_rule(geometry.vertices, 2 * k);
  proj.H = MatrixXd::Zero(nk, nk);
  MatrixXd stiffness = MatrixXd::Zero(nk, nk);
  for (int q = 0; q < rule.size(); ++q) {
    const VectorXd m = basis.values(rule.points[q]);
    const auto g = basis.gradients(rule.points[q]);
    proj.H.noalias() += rule.weights[q] * m * m.transpose();
    stiffness.noalias() += rule.weights[q] * g * g.transpose();
  }

  proj.D = MatrixXd::Zero(ndof, nk);
  for (int i = 0; i < layout.num_point_dofs(); ++i) {
    proj.D.row(i) = basis.values(layout.nodes[i]).transpose();
  }
  for (int m = 0; m < layout.num_moment_dofs(); ++m) {
    proj.D.row(mom + m) = proj.H.row(m) / area;
  }

  // Right-hand side by integration by parts:
  // (grad w, grad m) = -int w lap m + sum_e int_e w (grad m . n).
  proj.B = MatrixXd::Zero(nk, ndof);
  for (const auto& e : layout.edges) {
    for (std::size_t j = 0; j < e.dofs.size(); ++j) {
      const Point& x = layout.nodes[e.dofs[j]];
      const VectorXd dn = basis.gradients(x) * e.normal;
      for (int a = 1; a < nk; ++a) {
        proj.B(a, e.dofs[j]) += e.weights[j] * dn[a];
      }
    }
  }
  if (k >= 2) {
    const MatrixXd lap = basis.laplacian_matrix();
    for (int a = 1; a < nk; ++a) {
      for (int g = 0; g < lap.rows(); ++g) {
        proj.B(a, mom + g) -= area * lap(g, a);
      }
    }
  }

  proj.G = stiffness;
  if (k == 1) {
    const int n = layout.num_vertices;
    for (int i = 0; i < n; ++i) {
      proj.B(0, i) = 1.0 / n;
    }
    proj.G.row(0) = proj.D.topRows(n).colwise().mean();
  } else {
    proj.B(0, mom) = 1.0;
    proj.G.row(0) = proj.H.row(0) / area;
  }

  const Eigen::PartialPivLU<MatrixXd> lu(proj.G);
  if (!(inverse_condition(lu) * kConditionLimit > 1.0)) {
    throw VemError("singular elliptic projection matrix G on " + describe(geometry));
  }
  proj.pi_nabla = lu.solve(proj.B);
}

void build_pi0_k(const CellGeometry& geometry, const ScaledMonomialBasis& basis,
                 const DofLayout& layout, LocalProjectors& proj) {
  const int k = layout.order;
  const int nk = basis.size();
  const int nlow = ScaledMonomialBasis::dimension(k - 2);
  const int ndof = layout.size();
  const int mom = layout.moment_offset();
  const double area = geometry.area;

  const Eigen::PartialPivLU<MatrixXd> lu(proj.H);
  if (!(inverse_condition(lu) * kConditionLimit > 1.0)) {
    throw VemError("ill-conditioned monomial mass matrix on " + describe(geometry) +
                   "; use a smaller k or a better shaped cell");
  }

  // Moments int w m_a of the virtual function. Degrees <= k-2 are DOFs.
  // Higher degrees split m_a = q + p with p the L2 projection of m_a onto
  // P_{k-2}; the enhancement gives int w q = int (Pi_nabla w) q.
  MatrixXd C = MatrixXd::Zero(nk, ndof);
  for (int a = 0; a < nlow; ++a) {
    C(a, mom + a) = area;
  }
  Eigen::PartialPivLU<MatrixXd> low_lu;
  if (nlow > 0) {
    low_lu.compute(proj.H.topLeftCorner(nlow, nlow));
  }
  for (int a = nlow; a < nk; ++a) {
    VectorXd q = VectorXd::Unit(nk, a);
    VectorXd p_low;
    if (nlow > 0) {
      p_low = low_lu.solve(proj.H.block(0, a, nlow, 1));
      q.head(nlow) -= p_low;
    }
    C.row(a) = (proj.H * q).transpose() * proj.pi_nabla;
    for (int g = 0; g < nlow; ++g) {
      C(a, mom + g) += area * p_low[g];
    }
  }
  proj.pi0 = lu.solve(C);
}

void build_pi0_grad(const CellGeometry& geometry, const ScaledMonomialBasis& basis,
                    const DofLayout& layout, LocalProjectors& proj) {
  const int k = layout.order;
  const int nlow = ScaledMonomialBasis::dimension(k - 1);
  const int ndof = layout.size();
  const int mom = layout.moment_offset();
  const double area = geometry.area;
  const double h = basis.diameter();

  const MatrixXd mass = proj.H.topLeftCorner(nlow, nlow);
  const Eigen::PartialPivLU<MatrixXd> lu(mass);
  if (!(inverse_condition(lu) * kConditionLimit > 1.0)) {
    throw VemError("ill-conditioned monomial mass matrix on " + describe(geometry) +
                   "; use a smaller k or a better shaped cell");
  }
  const auto& exps = basis.exponents();
  for (int c = 0; c < 2; ++c) {
    // int (d_c w) m = -int w d_c m + int_{dK} w m n_c
    MatrixXd rhs = MatrixXd::Zero(nlow, ndof);
    for (const auto& e : layout.edges) {
      for (std::size_t j = 0; j < e.dofs.size(); ++j) {
        const VectorXd m = basis.values(layout.nodes[e.dofs[j]]);
        for (int a = 0; a < nlow; ++a) {
          rhs(a, e.dofs[j]) += e.weights[j] * m[a] * e.normal[c];
        }
      }
    }
    for (int a = 0; a < nlow; ++a) {
      const auto [ea, eb] = exps[a];
      const int power = (c == 0) ? ea : eb;
      if (power == 0) {
        continue;
      }
      const int lower = (c == 0) ? ScaledMonomialBasis::index(ea - 1, eb)
                                 : ScaledMonomialBasis::index(ea, eb - 1);
      rhs(a, mom + lower) -= area * power / h;
    }
    proj.pi0_grad[c] = lu.solve(rhs);
  }
}

LocalElement build_local_element(const CellGeometry& geometry, int k) {
  LocalElement el;
  el.geometry = geometry;
  el.basis = ScaledMonomialBasis(k, geometry.centroid, geometry.diameter);
  el.layout = build_dof_layout(geometry, k);
  build_pi_nabla(el.geometry, el.basis, el.layout, el.proj);
  build_pi0_k(el.geometry, el.basis, el.layout, el.proj);
  build_pi0_grad(el.geometry, el.basis, el.layout, el.proj);
  return el;
}

LocalElement build_local_element(const PolyMesh& mesh, int c, int k) {
  try {
    LocalElement el = build_local_element(compute_cell_geometry(mesh, c), k);
    el.cell = c;
    return el;
  } catch (const VemError& err) {
    throw VemError("cell " + std::to_string(c) + ": " + err.what());
  }
}

VectorXd interpolate(const LocalElement& element, const ScalarFunction& u) {
  const auto& layout = element.layout;
  VectorXd dofs(layout.size());
  for (int i = 0; i < layout.num_point_dofs(); ++i) {
    dofs[i] = u(layout.nodes[i]);
  }
  if (layout.num_moment_dofs() > 0) {
    const int k = layout.order;
    const PolygonRule rule = polygon_rule(element.geometry.vertices, 2 * k + 2);
    VectorXd moments = VectorXd::Zero(layout.num_moment_dofs());
    const ScaledMonomialBasis low(k - 2, element.basis.center(), element.basis.diameter());
    for (int q = 0; q < rule.size(); ++q) {
      moments += rule.weights[q] * u(rule.points[q]) * low.values(rule.points[q]);
    }
    dofs.tail(layout.num_moment_dofs()) = moments / element.geometry.area;
  }
  return dofs;
}

MatrixXd pi0_dof_matrix(const LocalElement& element) { return element.proj.D * element.proj.pi0; }

} // namespace sobvem
