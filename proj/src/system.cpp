#include "sobvem/system.hpp"

#include "sobvem/diagnostics.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace sobvem {

namespace {

template <class Fn>
void parallel_for(int n, Fn&& fn) {
  const int threads = std::min(configured_threads(), std::max(n, 1));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads) {
          fn(i);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

void append_double(std::string& out, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, res.ptr);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("error while writing '" + path + "'");
  }
}

} // namespace

int configured_threads() {
  const char* env = std::getenv("SOBVEM_THREADS");
  if (env == nullptr || *env == '\0') {
    return 1;
  }
  int n = 1;
  const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), n);
  if (res.ec != std::errc() || n < 1) {
    return 1;
  }
  return n;
}

GlobalDofMap build_dof_map(const PolyMesh& mesh, int k) {
  if (k < kMinOrder || k > kMaxOrder) {
    throw VemError("unsupported VEM order k = " + std::to_string(k) + " (supported: 1..3)");
  }
  GlobalDofMap map;
  map.order = k;
  map.num_vertices = mesh.num_vertices();
  map.num_edges = mesh.num_edges();
  map.num_cells = mesh.num_cells();
  const int per_edge = k - 1;
  const int per_cell = k * (k - 1) / 2;
  const int edge_offset = map.num_vertices;
  const int cell_offset = edge_offset + per_edge * map.num_edges;
  const int total = cell_offset + per_cell * map.num_cells;

  map.is_boundary.assign(total, 0);
  map.points.assign(map.num_point_dofs(), Point::Zero());
  for (int v = 0; v < map.num_vertices; ++v) {
    map.points[v] = mesh.vertex(v);
    map.is_boundary[v] = mesh.is_boundary_vertex(v) ? 1 : 0;
  }
  for (int e = 0; e < map.num_edges; ++e) {
    const Edge& edge = mesh.edge(e);
    if (per_edge > 0) {
      const EdgeRule rule =
          edge_gauss_lobatto(mesh.vertex(edge.vertices[0]), mesh.vertex(edge.vertices[1]), k + 1);
      for (int j = 0; j < per_edge; ++j) {
        const int g = edge_offset + e * per_edge + j;
        map.points[g] = rule.points[j + 1];
        map.is_boundary[g] = edge.on_boundary() ? 1 : 0;
      }
    }
  }

  map.cell_dofs.resize(map.num_cells);
  for (int c = 0; c < map.num_cells; ++c) {
    const auto& loop = mesh.cell(c);
    const auto& cell_edges = mesh.cell_edges(c);
    const int n = static_cast<int>(loop.size());
    auto& dofs = map.cell_dofs[c];
    dofs.reserve(n * k + per_cell);
    for (int v : loop) {
      dofs.push_back(v);
    }
    for (int i = 0; i < n; ++i) {
      const int e = cell_edges[i];
      const bool forward = loop[i] == mesh.edge(e).vertices[0];
      for (int j = 0; j < per_edge; ++j) {
        const int jj = forward ? j : per_edge - 1 - j;
        dofs.push_back(edge_offset + e * per_edge + jj);
      }
    }
    for (int m = 0; m < per_cell; ++m) {
      dofs.push_back(cell_offset + c * per_cell + m);
    }
  }

  map.position.assign(total, -1);
  for (int g = 0; g < total; ++g) {
    if (map.is_boundary[g]) {
      map.position[g] = static_cast<int>(map.boundary.size());
      map.boundary.push_back(g);
    } else {
      map.position[g] = static_cast<int>(map.active.size());
      map.active.push_back(g);
    }
  }
  return map;
}

SparseMatrix assemble_matrix(const GlobalDofMap& dofs, const std::vector<MatrixXd>& local) {
  const int total = dofs.num_dofs();
  std::vector<Eigen::Triplet<double>> triplets;
  std::size_t count = 0;
  for (const auto& m : local) {
    count += static_cast<std::size_t>(m.size());
  }
  triplets.reserve(count);
  for (int c = 0; c < static_cast<int>(local.size()); ++c) {
    const auto& map = dofs.cell_dofs[c];
    const MatrixXd& m = local[c];
    if (m.rows() != static_cast<Eigen::Index>(map.size()) || m.cols() != m.rows()) {
      throw std::logic_error("assemble: local matrix size does not match the DOF map");
    }
    for (int j = 0; j < m.cols(); ++j) {
      for (int i = 0; i < m.rows(); ++i) {
        const int gi = map[i];
        const int gj = map[j];
        if (gi < 0 || gi >= total || gj < 0 || gj >= total) {
          throw std::logic_error("assemble: global index out of range");
        }
        triplets.emplace_back(gi, gj, m(i, j));
      }
    }
  }
  SparseMatrix full(total, total);
  full.setFromTriplets(triplets.begin(), triplets.end());
  full.makeCompressed();
  return full;
}

BlockMatrix split_blocks(const GlobalDofMap& dofs, SparseMatrix full) {
  BlockMatrix b;
  std::vector<Eigen::Triplet<double>> taa, tab;
  for (int j = 0; j < full.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(full, j); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (dofs.is_boundary[r]) {
        continue;
      }
      const int pr = dofs.position[r];
      const int pc = dofs.position[j];
      if (dofs.is_boundary[j]) {
        tab.emplace_back(pr, pc, it.value());
      } else {
        taa.emplace_back(pr, pc, it.value());
      }
    }
  }
  b.aa.resize(dofs.num_active(), dofs.num_active());
  b.aa.setFromTriplets(taa.begin(), taa.end());
  b.ab.resize(dofs.num_active(), dofs.num_boundary());
  b.ab.setFromTriplets(tab.begin(), tab.end());
  b.full = std::move(full);
  return b;
}

void assemble(GlobalSystem& system, const std::vector<LocalForms>& forms) {
  const int nc = static_cast<int>(forms.size());
  std::vector<MatrixXd> m1(nc), m2(nc), a(nc), b(nc);
  double min_sigma = std::numeric_limits<double>::infinity();
  for (int c = 0; c < nc; ++c) {
    m1[c] = forms[c].M1;
    m2[c] = forms[c].M2;
    a[c] = forms[c].A;
    b[c] = forms[c].B;
    min_sigma = std::min(min_sigma, forms[c].min_sigma);
  }
  system.M1 = split_blocks(system.dofs, assemble_matrix(system.dofs, m1));
  system.M2 = split_blocks(system.dofs, assemble_matrix(system.dofs, m2));
  system.A = split_blocks(system.dofs, assemble_matrix(system.dofs, a));
  system.B = split_blocks(system.dofs, assemble_matrix(system.dofs, b));
  system.min_sigma = min_sigma;
}

GlobalSystem assemble(const PolyMesh& mesh, int k, const CoefficientField& field) {
  GlobalSystem system;
  system.field = field;
  system.dofs = build_dof_map(mesh, k);
  const int nc = mesh.num_cells();
  system.elements.resize(nc);
  system.bases.resize(nc);
  std::vector<LocalForms> forms(nc);
  parallel_for(nc, [&](int c) {
    system.elements[c] = build_local_element(mesh, c, k);
    system.bases[c] = evaluate_projected_basis(system.elements[c], form_quadrature_order(k));
    try {
      forms[c] = build_local_forms(system.elements[c], system.bases[c], field);
    } catch (const CoefficientError& err) {
      throw CoefficientError("cell " + std::to_string(c) + ": " + err.what());
    }
  });
  assemble(system, forms);
  if (system.min_sigma < 0.0) {
    std::ostringstream os;
    os << "problem '" << field.name << "': sigma = gamma - div(beta)/2 is negative (min "
       << system.min_sigma << ") at some quadrature points; continuing";
    warn(os.str());
  }
  return system;
}

Eigen::VectorXd GlobalSystem::load(double t) const {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(dofs.num_dofs());
  if (!field.f) {
    return F;
  }
  for (int c = 0; c < static_cast<int>(bases.size()); ++c) {
    const Eigen::VectorXd lc = build_local_load(bases[c], field.f, t);
    const auto& map = dofs.cell_dofs[c];
    for (int i = 0; i < lc.size(); ++i) {
      F[map[i]] += lc[i];
    }
  }
  return F;
}

Eigen::VectorXd GlobalSystem::dirichlet(double t) const {
  Eigen::VectorXd g(dofs.num_boundary());
  for (int i = 0; i < dofs.num_boundary(); ++i) {
    g[i] = field.g ? field.g(dofs.points[dofs.boundary[i]], t) : 0.0;
  }
  return g;
}

Eigen::VectorXd GlobalSystem::local(const Eigen::VectorXd& global, int c) const {
  const auto& map = dofs.cell_dofs[c];
  Eigen::VectorXd v(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    v[i] = global[map[i]];
  }
  return v;
}

namespace {

Eigen::VectorXd gather(const Eigen::VectorXd& full, const std::vector<int>& idx) {
  Eigen::VectorXd v(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    v[i] = full[idx[i]];
  }
  return v;
}

Eigen::VectorXd combine(const GlobalDofMap& dofs, const Eigen::VectorXd& ua,
                        const Eigen::VectorXd& ub) {
  Eigen::VectorXd u(dofs.num_dofs());
  for (int i = 0; i < dofs.num_active(); ++i) {
    u[dofs.active[i]] = ua[i];
  }
  for (int i = 0; i < dofs.num_boundary(); ++i) {
    u[dofs.boundary[i]] = ub[i];
  }
  return u;
}

} // namespace

Eigen::VectorXd interpolate_global(const GlobalSystem& system,
                                   const std::function<double(const Point&)>& u) {
  const auto& dofs = system.dofs;
  Eigen::VectorXd U = Eigen::VectorXd::Zero(dofs.num_dofs());
  for (int i = 0; i < dofs.num_point_dofs(); ++i) {
    U[i] = u(dofs.points[i]);
  }
  const int nmom = dofs.order * (dofs.order - 1) / 2;
  if (nmom > 0) {
    for (int c = 0; c < static_cast<int>(system.elements.size()); ++c) {
      const Eigen::VectorXd lc = interpolate(system.elements[c], u);
      const auto& map = dofs.cell_dofs[c];
      for (int m = 0; m < nmom; ++m) {
        const int i = static_cast<int>(map.size()) - nmom + m;
        U[map[i]] = lc[i];
      }
    }
  }
  return U;
}

Eigen::VectorXd project_initial(const GlobalSystem& system, const SolverConfig& config) {
  const auto& field = system.field;
  const auto& dofs = system.dofs;
  if (!field.grad_u0) {
    notice("problem '" + field.name +
           "' has no initial gradient; using the interpolant of u0 as initial value");
    return interpolate_global(system, field.u0);
  }
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dofs.num_dofs());
  for (int c = 0; c < static_cast<int>(system.bases.size()); ++c) {
    const auto& pb = system.bases[c];
    const int nq = pb.rule.size();
    Eigen::VectorXd fx(nq), fy(nq);
    for (int q = 0; q < nq; ++q) {
      const Point& x = pb.rule.points[q];
      const Point flux = field.mu(x) * field.grad_u0(x);
      fx[q] = pb.rule.weights[q] * flux.x();
      fy[q] = pb.rule.weights[q] * flux.y();
    }
    const Eigen::VectorXd lc = pb.grad_x * fx + pb.grad_y * fy;
    const auto& map = dofs.cell_dofs[c];
    for (int i = 0; i < lc.size(); ++i) {
      r[map[i]] += lc[i];
    }
  }
  Eigen::VectorXd gb(dofs.num_boundary());
  for (int i = 0; i < dofs.num_boundary(); ++i) {
    gb[i] = field.u0(dofs.points[dofs.boundary[i]]);
  }
  Eigen::VectorXd ua = Eigen::VectorXd::Zero(dofs.num_active());
  if (dofs.num_active() > 0) {
    const Eigen::VectorXd rhs = gather(r, dofs.active) - system.M2.ab * gb;
    ua = LinearSolver(system.M2.aa, config).solve(rhs);
  }
  return combine(dofs, ua, gb);
}

int TimeStepperConfig::num_steps() const {
  if (!(tau > 0.0) || !(final_time > 0.0)) {
    throw std::invalid_argument("time step and final time must be positive");
  }
  const double ratio = final_time / tau;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-12 * std::max(1.0, ratio) || n < 1.0) {
    throw std::invalid_argument("final time is not an integer multiple of the time step");
  }
  return static_cast<int>(n);
}

BackwardEuler::BackwardEuler(const GlobalSystem& system, const TimeStepperConfig& config)
    : system_(system), config_(config) {
  const double tau = config.tau;
  mass_aa_ = system.M1.aa + system.M2.aa;
  mass_ab_ = system.M1.ab + system.M2.ab;
  lhs_ab_ = mass_ab_ + tau * (system.A.ab + system.B.ab);
  const SparseMatrix lhs = mass_aa_ + tau * (system.A.aa + system.B.aa);
  solver_.set_config(config.solver);
  if (lhs.rows() > 0) {
    solver_.factorize(lhs);
  }
}

Eigen::VectorXd BackwardEuler::step(const Eigen::VectorXd& previous, double t) const {
  const auto& dofs = system_.dofs;
  const Eigen::VectorXd gb = system_.dirichlet(t);
  if (dofs.num_active() == 0) {
    return combine(dofs, Eigen::VectorXd(0), gb);
  }
  const Eigen::VectorXd F = system_.load(t);
  const Eigen::VectorXd rhs = mass_aa_ * gather(previous, dofs.active) +
                              mass_ab_ * gather(previous, dofs.boundary) +
                              config_.tau * gather(F, dofs.active) - lhs_ab_ * gb;
  return combine(dofs, solver_.solve(rhs), gb);
}

Eigen::VectorXd BackwardEuler::run(const Eigen::VectorXd& initial) const {
  const int steps = config_.num_steps();
  Eigen::VectorXd U = initial;
  double energy = config_.check_energy ? discrete_energy(system_, U) : 0.0;
  for (int n = 1; n <= steps; ++n) {
    const double t = n * config_.tau;
    U = step(U, t);
    if (config_.check_energy) {
      const double e = discrete_energy(system_, U);
      if (e > energy * (1.0 + 1e-10) + 1e-300) {
        std::ostringstream os;
        os << "discrete energy increased at step " << n << ": " << energy << " -> " << e;
        throw std::logic_error(os.str());
      }
      energy = e;
    }
  }
  return U;
}

Eigen::VectorXd backward_euler_step(const GlobalSystem& system, const Eigen::VectorXd& previous,
                                    double t, double tau, const SolverConfig& config) {
  TimeStepperConfig tc;
  tc.tau = tau;
  tc.final_time = tau;
  tc.solver = config;
  return BackwardEuler(system, tc).step(previous, t);
}

double discrete_energy(const GlobalSystem& system, const Eigen::VectorXd& U) {
  return U.dot(system.M1.full * U) + U.dot(system.M2.full * U);
}

void write_solution(const std::string& path, const Eigen::VectorXd& U) {
  std::string out = "solution 1\ndofs " + std::to_string(U.size()) + "\n";
  for (Eigen::Index i = 0; i < U.size(); ++i) {
    append_double(out, U[i]);
    out += '\n';
  }
  write_text(path, out);
}

Eigen::VectorXd read_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open solution file '" + path + "'");
  }
  std::string word;
  int version = 0;
  long n = -1;
  if (!(in >> word >> version) || word != "solution" || version != 1) {
    throw std::runtime_error("solution file '" + path + "': expected header 'solution 1'");
  }
  if (!(in >> word >> n) || word != "dofs" || n < 0) {
    throw std::runtime_error("solution file '" + path + "': expected 'dofs <n>'");
  }
  Eigen::VectorXd U(n);
  for (long i = 0; i < n; ++i) {
    std::string tok;
    if (!(in >> tok)) {
      throw std::runtime_error("solution file '" + path + "': too few values");
    }
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw std::runtime_error("solution file '" + path + "': bad value '" + tok + "'");
    }
    U[i] = v;
  }
  return U;
}

void write_cell_polynomials(const std::string& path, const GlobalSystem& system,
                            const Eigen::VectorXd& U) {
  std::string out = "cellpoly 1\norder " + std::to_string(system.order()) + "\ncells " +
                    std::to_string(system.elements.size()) + "\n";
  for (int c = 0; c < static_cast<int>(system.elements.size()); ++c) {
    const auto& el = system.elements[c];
    const Eigen::VectorXd coeffs = el.proj.pi0 * system.local(U, c);
    out += std::to_string(coeffs.size());
    for (double v : {el.basis.center().x(), el.basis.center().y(), el.basis.diameter()}) {
      out += ' ';
      append_double(out, v);
    }
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      out += ' ';
      append_double(out, coeffs[i]);
    }
    out += '\n';
  }
  write_text(path, out);
}

} // namespace sobvem
