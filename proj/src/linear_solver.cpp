#include "sobvem/linear_solver.hpp"

#include <sstream>
#include <vector>

namespace sobvem {

namespace {

// r = b - A x accumulated in extended precision, so the residual is not
// swamped by the rounding of the product itself.
Eigen::VectorXd residual(const SparseMatrix& a, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
  std::vector<long double> acc(b.data(), b.data() + b.size());
  for (int j = 0; j < a.outerSize(); ++j) {
    const long double xj = x[j];
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
      acc[it.row()] -= static_cast<long double>(it.value()) * xj;
    }
  }
  Eigen::VectorXd r(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    r[i] = static_cast<double>(acc[i]);
  }
  return r;
}

} // namespace

LinearSolver::LinearSolver(const SparseMatrix& matrix, SolverConfig config) : config_(config) {
  factorize(matrix);
}

void LinearSolver::factorize(const SparseMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw SolverError("linear solver: matrix is not square");
  }
  matrix_ = matrix;
  matrix_.makeCompressed();
  lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
  lu_->analyzePattern(matrix_);
  lu_->factorize(matrix_);
  if (lu_->info() != Eigen::Success) {
    throw SolverError("linear solver: factorization failed (" + lu_->lastErrorMessage() + ")");
  }
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& rhs) const {
  if (!lu_) {
    throw SolverError("linear solver: solve called before factorize");
  }
  if (rhs.size() != matrix_.rows()) {
    throw SolverError("linear solver: right-hand side has the wrong size");
  }
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    last_residual_ = 0.0;
    last_iterations_ = 0;
    return Eigen::VectorXd::Zero(rhs.size());
  }
  Eigen::VectorXd x = lu_->solve(rhs);
  Eigen::VectorXd r = residual(matrix_, x, rhs);
  double rel = r.norm() / bnorm;
  int it = 0;
  while (!(rel <= config_.tolerance) && it < config_.max_iterations) {
    x += lu_->solve(r);
    r = residual(matrix_, x, rhs);
    rel = r.norm() / bnorm;
    ++it;
  }
  last_residual_ = rel;
  last_iterations_ = it;
  if (!(rel <= config_.tolerance)) {
    std::ostringstream os;
    os << "linear solver did not converge: relative residual " << rel << " > tolerance "
       << config_.tolerance << " after " << it << " refinement sweeps";
    throw SolverError(os.str());
  }
  return x;
}

Eigen::VectorXd solve_linear(const SparseMatrix& matrix, const Eigen::VectorXd& rhs,
                             const SolverConfig& config) {
  return LinearSolver(matrix, config).solve(rhs);
}

} // namespace sobvem
