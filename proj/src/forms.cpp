#include "sobvem/forms.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sobvem {

namespace {

std::string where(const Point& x) {
  std::ostringstream os;
  os << "(" << x.x() << ", " << x.y() << ")";
  return os.str();
}

void check_spd(const Matrix2& m, const char* what, const Point& x) {
  if (!m.allFinite()) {
    throw CoefficientError(std::string(what) + " is not finite at " + where(x));
  }
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if (std::abs(m(0, 1) - m(1, 0)) > 1e-12 * scale) {
    throw CoefficientError(std::string(what) + " is not symmetric at " + where(x));
  }
  if (!(m(0, 0) > 0.0 && m.determinant() > 0.0)) {
    throw CoefficientError(std::string(what) + " is not positive definite at " + where(x));
  }
}

double finite(double v, const char* what, const Point& x) {
  if (!std::isfinite(v)) {
    throw CoefficientError(std::string(what) + " is not finite at " + where(x));
  }
  return v;
}

} // namespace

LocalConstants constant_coefficient_approx(const CellGeometry& geometry,
                                           const CoefficientField& field) {
  const Point& xk = geometry.centroid;
  const Matrix2 mu = field.mu(xk);
  const Matrix2 eps = field.eps(xk);
  if (!mu.allFinite() || !eps.allFinite()) {
    throw CoefficientError("non-finite diffusion coefficient at centroid " + where(xk));
  }
  LocalConstants c;
  c.mu = 0.5 * mu.trace();
  c.eps = 0.5 * eps.trace();
  c.sigma = std::max(finite(field.sigma(xk), "sigma", xk), 0.0);
  return c;
}

Stabilizations build_stabilizations(const LocalElement& element, const LocalConstants& constants) {
  const int n = element.num_dofs();
  const MatrixXd Q = MatrixXd::Identity(n, n) - pi0_dof_matrix(element);
  const MatrixXd QtQ = Q.transpose() * Q;
  const double area = element.geometry.area;
  Stabilizations s;
  s.S1 = area * QtQ;
  s.S2 = constants.mu * QtQ;
  s.S3 = s3_weight(constants, area) * QtQ;
  return s;
}

ProjectedBasis evaluate_projected_basis(const LocalElement& element, int order) {
  ProjectedBasis pb;
  pb.rule = polygon_rule(element.geometry.vertices, order);
  const int nq = pb.rule.size();
  const int k = element.layout.order;
  const int nk = element.basis.size();
  const int nlow = ScaledMonomialBasis::dimension(k - 1);
  MatrixXd mono(nk, nq);
  for (int q = 0; q < nq; ++q) {
    mono.col(q) = element.basis.values(pb.rule.points[q]);
  }
  pb.values = element.proj.pi0.transpose() * mono;
  pb.grad_x = element.proj.pi0_grad[0].transpose() * mono.topRows(nlow);
  pb.grad_y = element.proj.pi0_grad[1].transpose() * mono.topRows(nlow);
  return pb;
}

LocalForms build_local_forms(const LocalElement& element, const CoefficientField& field) {
  return build_local_forms(
      element, evaluate_projected_basis(element, form_quadrature_order(element.layout.order)),
      field);
}

LocalForms build_local_forms(const LocalElement& element, const ProjectedBasis& pb,
                             const CoefficientField& field) {
  const int nq = pb.rule.size();

  // Per-point weights of each coefficient entry.
  VectorXd w(nq), mxx(nq), mxy(nq), myy(nq), exx(nq), exy(nq), eyy(nq), sig(nq), bx(nq), by(nq);
  double min_sigma = std::numeric_limits<double>::infinity();
  for (int q = 0; q < nq; ++q) {
    const Point& x = pb.rule.points[q];
    const double wq = pb.rule.weights[q];
    const Matrix2 mu = field.mu(x);
    const Matrix2 eps = field.eps(x);
    check_spd(mu, "mu", x);
    check_spd(eps, "eps", x);
    const Point beta = field.beta(x);
    if (!beta.allFinite()) {
      throw CoefficientError("beta is not finite at " + where(x));
    }
    const double s = finite(field.sigma(x), "sigma", x);
    min_sigma = std::min(min_sigma, s);
    w[q] = wq;
    mxx[q] = wq * mu(0, 0);
    mxy[q] = wq * 0.5 * (mu(0, 1) + mu(1, 0));
    myy[q] = wq * mu(1, 1);
    exx[q] = wq * eps(0, 0);
    exy[q] = wq * 0.5 * (eps(0, 1) + eps(1, 0));
    eyy[q] = wq * eps(1, 1);
    sig[q] = wq * s;
    bx[q] = wq * beta.x();
    by[q] = wq * beta.y();
  }

  const MatrixXd& V = pb.values;
  const MatrixXd& Gx = pb.grad_x;
  const MatrixXd& Gy = pb.grad_y;
  auto tensor_form = [&](const VectorXd& axx, const VectorXd& axy, const VectorXd& ayy) {
    const MatrixXd fx = Gx * axx.asDiagonal() + Gy * axy.asDiagonal();
    const MatrixXd fy = Gx * axy.asDiagonal() + Gy * ayy.asDiagonal();
    MatrixXd r = fx * Gx.transpose() + fy * Gy.transpose();
    return MatrixXd(0.5 * (r + r.transpose()));
  };

  LocalForms forms;
  forms.constants = constant_coefficient_approx(element.geometry, field);
  forms.min_sigma = min_sigma;
  const Stabilizations stab = build_stabilizations(element, forms.constants);

  MatrixXd mass = V * w.asDiagonal() * V.transpose();
  forms.M1 = 0.5 * (mass + mass.transpose()) + stab.S1;
  forms.M2 = tensor_form(mxx, mxy, myy) + stab.S2;
  MatrixXd reaction = V * sig.asDiagonal() * V.transpose();
  forms.A = tensor_form(exx, exy, eyy) + 0.5 * (reaction + reaction.transpose()) + stab.S3;

  // E(i, j) = (beta . Pi0 grad phi_j, Pi0 phi_i)
  const MatrixXd E = V * (bx.asDiagonal() * Gx.transpose() + by.asDiagonal() * Gy.transpose());
  forms.B = 0.5 * (E - E.transpose());
  return forms;
}

VectorXd build_local_load(const ProjectedBasis& pb,
                          const std::function<double(const Point&, double)>& f, double t) {
  VectorXd fw(pb.rule.size());
  for (int q = 0; q < pb.rule.size(); ++q) {
    fw[q] = pb.rule.weights[q] * f(pb.rule.points[q], t);
  }
  return pb.values * fw;
}

VectorXd build_local_load(const LocalElement& element,
                          const std::function<double(const Point&, double)>& f, double t) {
  return build_local_load(
      evaluate_projected_basis(element, form_quadrature_order(element.layout.order)), f, t);
}

} // namespace sobvem
