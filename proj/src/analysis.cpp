#include "sobvem/analysis.hpp"

#include "sobvem/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace sobvem {

ErrorPair compute_errors(const GlobalSystem& system, const Eigen::VectorXd& U, double t) {
  const auto& field = system.field;
  if (!field.has_exact_solution()) {
    throw std::invalid_argument("problem '" + field.name + "' has no exact solution");
  }
  const int k = system.order();
  const int nlow = ScaledMonomialBasis::dimension(k - 1);
  double e0 = 0.0;
  double e1 = 0.0;
  for (int c = 0; c < static_cast<int>(system.elements.size()); ++c) {
    const auto& el = system.elements[c];
    const Eigen::VectorXd uc = system.local(U, c);
    const Eigen::VectorXd p = el.proj.pi0 * uc;
    const Eigen::VectorXd gx = el.proj.pi0_grad[0] * uc;
    const Eigen::VectorXd gy = el.proj.pi0_grad[1] * uc;
    const PolygonRule rule = polygon_rule(el.geometry.vertices, error_quadrature_order(k));
    for (int q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      const Eigen::VectorXd m = el.basis.values(x);
      const double d0 = field.u_exact(x, t) - m.dot(p);
      const Point gu = field.grad_u_exact(x, t);
      const double dx = gu.x() - m.head(nlow).dot(gx);
      const double dy = gu.y() - m.head(nlow).dot(gy);
      e0 += rule.weights[q] * d0 * d0;
      e1 += rule.weights[q] * (dx * dx + dy * dy);
    }
  }
  ErrorPair out;
  out.E0 = std::sqrt(e0);
  out.E1 = std::sqrt(e1);
  out.dofs = system.dofs.num_dofs();
  out.active_dofs = system.dofs.num_active();
  double h = 0.0;
  for (const auto& el : system.elements) {
    h = std::max(h, el.geometry.diameter);
  }
  out.h = h;
  return out;
}

double eoc(double e_prev, double e_cur, double h_prev, double h_cur) {
  return std::log(e_prev / e_cur) / std::log(h_prev / h_cur);
}

ConvergenceRecord compute_eoc(const std::vector<ErrorPair>& levels, int k) {
  ConvergenceRecord rec;
  rec.k = k;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    ConvergenceRow row;
    row.errors = levels[i];
    if (i > 0) {
      const ErrorPair& prev = levels[i - 1];
      if (!(levels[i].h < prev.h)) {
        throw std::invalid_argument("EOC needs a strictly decreasing h sequence");
      }
      row.eoc0 = eoc(prev.E0, levels[i].E0, prev.h, levels[i].h);
      row.eoc1 = eoc(prev.E1, levels[i].E1, prev.h, levels[i].h);
    }
    rec.rows.push_back(row);
  }
  return rec;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("slope needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) {
    throw std::invalid_argument("slope needs distinct x values");
  }
  return (n * sxy - sx * sy) / den;
}

MeshFamily parse_family(const std::string& name) {
  if (name == "voronoi") return MeshFamily::Voronoi;
  if (name == "distorted") return MeshFamily::Distorted;
  if (name == "concave") return MeshFamily::Concave;
  if (name == "square") return MeshFamily::Square;
  throw std::invalid_argument("unknown mesh family '" + name + "'");
}

std::string family_name(MeshFamily family) {
  switch (family) {
    case MeshFamily::Voronoi: return "voronoi";
    case MeshFamily::Distorted: return "distorted";
    case MeshFamily::Concave: return "concave";
    case MeshFamily::Square: return "square";
  }
  return "unknown";
}

PolyMesh ladder_mesh(const LadderConfig& config, int level) {
  const int m = config.start + level;
  if (m < 0) {
    throw std::invalid_argument("negative ladder level");
  }
  if (config.base < 0) {
    throw std::invalid_argument("negative ladder base");
  }
  auto base = [&](int fallback) { return config.base > 0 ? config.base : fallback; };
  switch (config.family) {
    case MeshFamily::Distorted:
      return generate_distorted_square_mesh(base(4) << m, config.distortion, config.seed + level);
    case MeshFamily::Concave:
      return generate_concave_mesh(base(2) << m);
    case MeshFamily::Voronoi:
      return generate_voronoi_mesh(base(16) << (2 * m), config.lloyd, config.seed + level);
    case MeshFamily::Square:
      return generate_square_mesh(base(4) << m);
  }
  throw std::invalid_argument("unknown mesh family");
}

SolveOutput solve_on_mesh(const PolyMesh& mesh, const CoefficientField& field, int k,
                          const TimeStepperConfig& time) {
  const auto start = std::chrono::steady_clock::now();
  SolveOutput out;
  out.system = assemble(mesh, k, field);
  const Eigen::VectorXd U0 = project_initial(out.system, time.solver);
  out.U = BackwardEuler(out.system, time).run(U0);
  if (field.has_exact_solution()) {
    out.errors = compute_errors(out.system, out.U, time.final_time);
  } else {
    out.errors.dofs = out.system.dofs.num_dofs();
    out.errors.active_dofs = out.system.dofs.num_active();
    out.errors.h = mesh_quality(mesh).h;
  }
  out.errors.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ConvergenceRecord run_convergence_sweep(const SweepConfig& config) {
  const CoefficientField field = make_problem(config.problem);
  std::vector<ErrorPair> levels;
  for (int level = 0; level < config.levels; ++level) {
    const PolyMesh mesh = ladder_mesh(config.ladder, level);
    levels.push_back(solve_on_mesh(mesh, field, config.k, config.time).errors);
  }
  ConvergenceRecord rec = compute_eoc(levels, config.k);
  rec.problem = field.name;
  rec.family = family_name(config.ladder.family);
  return rec;
}

namespace {

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

} // namespace

std::string format_convergence_csv(const ConvergenceRecord& record) {
  std::string out = "k,h,dofs,E0h,EOC0,E1h,EOC1,seconds\n";
  for (const auto& row : record.rows) {
    const auto& e = row.errors;
    out += std::to_string(record.k) + "," + sci(e.h) + "," + std::to_string(e.dofs) + "," +
           sci(e.E0) + "," + (row.eoc0 ? fixed(*row.eoc0, 4) : "") + "," + sci(e.E1) + "," +
           (row.eoc1 ? fixed(*row.eoc1, 4) : "") + "," + fixed(e.seconds, 3) + "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("error while writing '" + path + "'");
  }
}

void write_convergence_csv(const std::string& path, const ConvergenceRecord& record) {
  write_text_file(path, format_convergence_csv(record));
}

std::vector<double> error_indicators(const GlobalSystem& system, const Eigen::VectorXd& U) {
  std::vector<double> eta2(system.elements.size(), 0.0);
  for (int c = 0; c < static_cast<int>(system.elements.size()); ++c) {
    const auto& el = system.elements[c];
    const Eigen::VectorXd uc = system.local(U, c);
    const Eigen::VectorXd diff = (el.proj.pi0 - el.proj.pi_nabla) * uc;
    const double l2 = diff.dot(el.proj.H * diff);
    // S3(u, u) as a scaled squared norm of (I - D Pi0) u keeps it accurate near zero
    const LocalConstants constants = constant_coefficient_approx(el.geometry, system.field);
    const Eigen::VectorXd kernel = uc - pi0_dof_matrix(el) * uc;
    eta2[c] = std::max(l2, 0.0) + s3_weight(constants, el.geometry.area) * kernel.squaredNorm();
  }
  return eta2;
}

std::set<int> dorfler_mark(const std::vector<double>& eta2, double theta) {
  std::vector<int> order(eta2.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return eta2[a] > eta2[b]; });
  const double total = std::accumulate(eta2.begin(), eta2.end(), 0.0);
  std::set<int> marked;
  double sum = 0.0;
  for (int c : order) {
    if (sum >= theta * total && !marked.empty()) {
      break;
    }
    marked.insert(c);
    sum += eta2[c];
  }
  return marked;
}

AdaptiveStudy run_adaptive_study(const AdaptiveConfig& config) {
  const CoefficientField field = make_problem(config.problem);
  if (!field.has_exact_solution()) {
    throw std::invalid_argument("adaptive study needs a problem with an exact solution");
  }
  AdaptiveStudy study;
  for (int m = 0; m < config.uniform_levels; ++m) {
    const PolyMesh mesh = generate_square_mesh(config.initial_n << m);
    const SolveOutput out = solve_on_mesh(mesh, field, config.k, config.time);
    study.uniform.push_back({m, mesh.num_cells(), out.errors});
  }
  const int budget = study.uniform.back().errors.active_dofs;

  PolyMesh mesh = generate_square_mesh(config.initial_n);
  for (int cycle = 0; cycle < config.max_cycles; ++cycle) {
    const SolveOutput out = solve_on_mesh(mesh, field, config.k, config.time);
    study.adaptive.push_back({cycle, mesh.num_cells(), out.errors});
    if (out.errors.active_dofs >= budget || config.uniform_levels == 1) {
      break;
    }
    const std::set<int> marked = dorfler_mark(error_indicators(out.system, out.U), config.theta);
    mesh = refine_cells(mesh, marked);
  }
  study.final_mesh = mesh;
  return study;
}

std::optional<double> loglog_interpolate(const std::vector<double>& x,
                                         const std::vector<double>& y, double xq) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double lo = std::min(x[i], x[i + 1]);
    const double hi = std::max(x[i], x[i + 1]);
    if (xq >= lo && xq <= hi) {
      if (x[i] == x[i + 1]) {
        return std::min(y[i], y[i + 1]);
      }
      const double s = std::log(xq / x[i]) / std::log(x[i + 1] / x[i]);
      return std::exp(std::log(y[i]) + s * std::log(y[i + 1] / y[i]));
    }
  }
  return std::nullopt;
}

std::string format_adaptive_csv(const AdaptiveStudy& study) {
  std::string out = "strategy,step,cells,dofs,active_dofs,h,E0h,E1h,seconds\n";
  auto emit = [&](const char* name, const std::vector<AdaptivePoint>& pts) {
    for (const auto& p : pts) {
      out += std::string(name) + "," + std::to_string(p.cycle) + "," + std::to_string(p.cells) +
             "," + std::to_string(p.errors.dofs) + "," + std::to_string(p.errors.active_dofs) +
             "," + sci(p.errors.h) + "," + sci(p.errors.E0) + "," + sci(p.errors.E1) + "," +
             fixed(p.errors.seconds, 3) + "\n";
    }
  };
  emit("uniform", study.uniform);
  emit("adaptive", study.adaptive);
  return out;
}

} // namespace sobvem
