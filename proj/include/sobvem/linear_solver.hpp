#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>
#include <stdexcept>

namespace sobvem {

using SparseMatrix = Eigen::SparseMatrix<double>;

class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double tolerance = 1e-12;  // relative residual ||A x - b|| / ||b||
  int max_iterations = 10;   // iterative refinement sweeps
};

/// Sparse LU factorization with a residual contract. Each solve is followed
/// by iterative refinement until the relative residual meets the tolerance.
class LinearSolver {
public:
  LinearSolver() = default;
  LinearSolver(const SparseMatrix& matrix, SolverConfig config = {});

  void factorize(const SparseMatrix& matrix);
  void set_config(const SolverConfig& config) { config_ = config; }
  const SolverConfig& config() const { return config_; }

  /// Throws SolverError with the achieved residual if the tolerance is not
  /// met after max_iterations refinement sweeps.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  double last_residual() const { return last_residual_; }
  int last_iterations() const { return last_iterations_; }

private:
  SparseMatrix matrix_;
  std::shared_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
  SolverConfig config_;
  mutable double last_residual_ = 0.0;
  mutable int last_iterations_ = 0;
};

Eigen::VectorXd solve_linear(const SparseMatrix& matrix, const Eigen::VectorXd& rhs,
                             const SolverConfig& config = {});

} // namespace sobvem
