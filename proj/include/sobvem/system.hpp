#pragma once

#include "sobvem/forms.hpp"
#include "sobvem/linear_solver.hpp"
#include "sobvem/mesh.hpp"
#include "sobvem/vem_local.hpp"

#include <string>
#include <vector>

namespace sobvem {

/// Global numbering: vertices, then edge interior points (k-1 per edge, in
/// the direction from the lower to the higher vertex index), then the
/// moments of each cell.
struct GlobalDofMap {
  int order = 1;
  int num_vertices = 0;
  int num_edges = 0;
  int num_cells = 0;
  std::vector<std::vector<int>> cell_dofs;  // local -> global per cell
  std::vector<Point> points;                // location of each point DOF
  std::vector<char> is_boundary;            // per global DOF
  std::vector<int> active;                  // global indices of free DOFs
  std::vector<int> boundary;                // global indices of Dirichlet DOFs
  std::vector<int> position;                // index within active or boundary

  int num_dofs() const { return static_cast<int>(is_boundary.size()); }
  int num_active() const { return static_cast<int>(active.size()); }
  int num_boundary() const { return static_cast<int>(boundary.size()); }
  int num_point_dofs() const { return num_vertices + (order - 1) * num_edges; }
};

GlobalDofMap build_dof_map(const PolyMesh& mesh, int k);

/// A matrix split into the active-active and active-boundary blocks.
struct BlockMatrix {
  SparseMatrix full;
  SparseMatrix aa;
  SparseMatrix ab;
};

struct GlobalSystem {
  GlobalDofMap dofs;
  std::vector<LocalElement> elements;
  std::vector<ProjectedBasis> bases;  // rules of order 2k+2
  BlockMatrix M1, M2, A, B;
  CoefficientField field;
  double min_sigma = 0.0;

  int order() const { return dofs.order; }

  /// Full load vector F_i = sum_K (f(t), Pi0_k phi_i)_K.
  Eigen::VectorXd load(double t) const;
  /// Dirichlet values g(t) at the boundary DOFs.
  Eigen::VectorXd dirichlet(double t) const;
  /// Local DOF vector of cell c taken from a global vector.
  Eigen::VectorXd local(const Eigen::VectorXd& global, int c) const;
};

/// Scatter-adds local matrices (cells in index order) into an N^W matrix.
SparseMatrix assemble_matrix(const GlobalDofMap& dofs, const std::vector<MatrixXd>& local);
BlockMatrix split_blocks(const GlobalDofMap& dofs, SparseMatrix full);

/// Builds local elements and forms for every cell and assembles them.
/// Warns if sigma is negative somewhere.
GlobalSystem assemble(const PolyMesh& mesh, int k, const CoefficientField& field);

/// Assembles already built local forms.
void assemble(GlobalSystem& system, const std::vector<LocalForms>& forms);

/// Elliptic projection m2_h(U0, v) = (mu grad u0, Pi0 grad v) with boundary
/// values g(0). Falls back to interpolation when grad u0 is missing.
Eigen::VectorXd project_initial(const GlobalSystem& system, const SolverConfig& config = {});

/// Global DOF vector of the interpolant of u(., t).
Eigen::VectorXd interpolate_global(const GlobalSystem& system,
                                   const std::function<double(const Point&)>& u);

struct TimeStepperConfig {
  double tau = 1e-3;
  double final_time = 1.0;
  SolverConfig solver;
  bool check_energy = false;  // assert ||U||_{M1+M2} is non-increasing

  /// Number of steps; throws if final_time / tau is not an integer.
  int num_steps() const;
};

/// Backward Euler for (M1 + M2) dU/dt + (A + B) U = F with Dirichlet data.
/// The matrix M1 + M2 + tau (A + B) is factorized once.
class BackwardEuler {
public:
  BackwardEuler(const GlobalSystem& system, const TimeStepperConfig& config);

  Eigen::VectorXd step(const Eigen::VectorXd& previous, double t) const;
  /// Steps from U0 at t = 0 to final_time.
  Eigen::VectorXd run(const Eigen::VectorXd& initial) const;

  const LinearSolver& solver() const { return solver_; }

private:
  const GlobalSystem& system_;
  TimeStepperConfig config_;
  SparseMatrix mass_aa_, mass_ab_;   // (M1 + M2) blocks
  SparseMatrix lhs_ab_;              // boundary coupling of the step matrix
  LinearSolver solver_;
};

Eigen::VectorXd backward_euler_step(const GlobalSystem& system, const Eigen::VectorXd& previous,
                                    double t, double tau, const SolverConfig& config = {});

/// Discrete energy ||U||^2_{M1} + ||U||^2_{M2}.
double discrete_energy(const GlobalSystem& system, const Eigen::VectorXd& U);

// Snapshot files.
void write_solution(const std::string& path, const Eigen::VectorXd& U);
Eigen::VectorXd read_solution(const std::string& path);
/// Per-cell Pi0_k coefficients: "cellpoly 1", "order k", "cells m", then per
/// cell "n_k xK yK hK c0 ... c{n_k-1}".
void write_cell_polynomials(const std::string& path, const GlobalSystem& system,
                            const Eigen::VectorXd& U);

/// Thread count from SOBVEM_THREADS (default 1).
int configured_threads();

} // namespace sobvem
