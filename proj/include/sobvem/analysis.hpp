#pragma once

#include "sobvem/problems.hpp"
#include "sobvem/system.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sobvem {

struct ErrorPair {
  double h = 0.0;
  double E0 = 0.0;  // sqrt(sum_K ||u - Pi0_k u_h||^2_K)
  double E1 = 0.0;  // sqrt(sum_K ||grad u - Pi0_{k-1} grad u_h||^2_K)
  int dofs = 0;
  int active_dofs = 0;
  double seconds = 0.0;
};

/// Quadrature order of the error integrals.
inline int error_quadrature_order(int k) { return 2 * k + 4; }

/// E0 and E1 of U against the exact solution at time t. Throws
/// std::invalid_argument if the problem has no exact solution.
ErrorPair compute_errors(const GlobalSystem& system, const Eigen::VectorXd& U, double t);

struct ConvergenceRow {
  ErrorPair errors;
  std::optional<double> eoc0;
  std::optional<double> eoc1;
};

struct ConvergenceRecord {
  std::string problem;
  std::string family;
  int k = 1;
  std::vector<ConvergenceRow> rows;
};

/// log(e_prev / e_cur) / log(h_prev / h_cur).
double eoc(double e_prev, double e_cur, double h_prev, double h_cur);

/// Fills the EOC columns; the first row stays blank. Throws
/// std::invalid_argument unless h strictly decreases.
ConvergenceRecord compute_eoc(const std::vector<ErrorPair>& levels, int k);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

enum class MeshFamily { Voronoi, Distorted, Concave, Square };

MeshFamily parse_family(const std::string& name);
std::string family_name(MeshFamily family);

/// Mesh ladders of the convergence studies. Level m uses
///   distorted: n = b * 2^m cells per side, interior offsets up to distortion / n
///   concave:   n = b * 2^m blocks per side
///   voronoi:   b * 4^m jittered seeds with `lloyd` Lloyd steps
///   square:    n = b * 2^m
/// where m = start + level and b = base, or 4, 2, 16, 4 when base is 0.
struct LadderConfig {
  MeshFamily family = MeshFamily::Distorted;
  int start = 0;
  int base = 0;
  double distortion = 0.2;
  int lloyd = 3;
  std::uint64_t seed = 1;
};

PolyMesh ladder_mesh(const LadderConfig& config, int level);

struct SolveOutput {
  GlobalSystem system;
  Eigen::VectorXd U;
  ErrorPair errors;  // errors are left zero when the problem has no exact solution
};

/// Assembles, projects the initial datum, steps to the final time and
/// measures the errors.
SolveOutput solve_on_mesh(const PolyMesh& mesh, const CoefficientField& field, int k,
                          const TimeStepperConfig& time);

struct SweepConfig {
  std::string problem = "example1";
  LadderConfig ladder;
  int k = 1;
  int levels = 4;
  TimeStepperConfig time;
};

ConvergenceRecord run_convergence_sweep(const SweepConfig& config);

/// CSV with columns k,h,dofs,E0h,EOC0,E1h,EOC1,seconds.
std::string format_convergence_csv(const ConvergenceRecord& record);
void write_convergence_csv(const std::string& path, const ConvergenceRecord& record);

/// Squared indicators eta_K^2 = ||Pi0_k u_h - Pi_nabla u_h||_K^2 + S3^K(u_h, u_h).
std::vector<double> error_indicators(const GlobalSystem& system, const Eigen::VectorXd& U);

/// Smallest set of cells (largest indicators first) whose squared
/// indicators sum to at least theta times the total.
std::set<int> dorfler_mark(const std::vector<double>& eta2, double theta);

struct AdaptiveConfig {
  std::string problem = "example3";
  int k = 1;
  int initial_n = 8;          // uniform square mesh to start from
  int uniform_levels = 4;     // n = initial_n * 2^m, m < uniform_levels
  int max_cycles = 60;        // safety bound on adaptive cycles
  double theta = 0.3;         // Doerfler fraction
  TimeStepperConfig time;
};

struct AdaptivePoint {
  int cycle = 0;
  int cells = 0;
  ErrorPair errors;
};

struct AdaptiveStudy {
  std::vector<AdaptivePoint> uniform;
  std::vector<AdaptivePoint> adaptive;
  PolyMesh final_mesh;
};

/// Uniform refinement from initial_n, then adaptive cycles from the same
/// start until the active DOF count reaches the largest uniform one.
AdaptiveStudy run_adaptive_study(const AdaptiveConfig& config);

/// Log-log interpolation of (x, y) at xq; nullopt outside the data range.
std::optional<double> loglog_interpolate(const std::vector<double>& x,
                                         const std::vector<double>& y, double xq);

std::string format_adaptive_csv(const AdaptiveStudy& study);

// SVG log-log plots.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "h";
  std::string y_label = "error";
  std::vector<double> reference_slopes;  // drawn as triangles
  bool x_decreasing = false;             // reverse the x axis
};

std::string format_loglog_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);
void write_text_file(const std::string& path, const std::string& text);

} // namespace sobvem
