#include "sobvem/analysis.hpp"
#include "sobvem/diagnostics.hpp"
#include "sobvem/mesh.hpp"
#include "sobvem/problems.hpp"
#include "sobvem/system.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sobvem;

namespace {

struct MeshOptions {
  std::string family = "distorted";
  std::string file;
  int n = 4;
  int seeds = 64;
  int lloyd = 3;
  double distortion = 0.2;
  std::uint64_t seed = 1;
};

struct TimeOptions {
  double tau = 1e-3;
  double final_time = 1.0;
  double tolerance = 1e-12;
  int max_iterations = 10;
};

void add_mesh_options(CLI::App* app, MeshOptions& m, bool with_family) {
  if (with_family) {
    app->add_option("--family", m.family, "voronoi | distorted | concave | square | file")
        ->check(CLI::IsMember({"voronoi", "distorted", "concave", "square", "file"}));
    app->add_option("--mesh", m.file, "mesh file (with --family file)");
  }
  app->add_option("--n", m.n, "cells (or concave blocks) per side")->check(CLI::Range(1, 4096));
  app->add_option("--seeds", m.seeds, "Voronoi seed count")->check(CLI::Range(4, 10000000));
  app->add_option("--lloyd", m.lloyd, "Lloyd iterations")->check(CLI::Range(0, 1000));
  app->add_option("--distortion", m.distortion, "distortion fraction in [0, 0.5)")
      ->check(CLI::Range(0.0, 0.4999999));
  app->add_option("--seed", m.seed, "random seed");
}

void add_time_options(CLI::App* app, TimeOptions& t) {
  app->add_option("--tau", t.tau, "time step")->check(CLI::PositiveNumber);
  app->add_option("--T", t.final_time, "final time")->check(CLI::PositiveNumber);
  app->add_option("--tol", t.tolerance, "linear solver relative residual tolerance")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-iter", t.max_iterations, "iterative refinement sweeps")
      ->check(CLI::Range(0, 1000));
}

TimeStepperConfig to_config(const TimeOptions& t) {
  TimeStepperConfig c;
  c.tau = t.tau;
  c.final_time = t.final_time;
  c.solver.tolerance = t.tolerance;
  c.solver.max_iterations = t.max_iterations;
  c.num_steps();
  return c;
}

PolyMesh make_mesh(const MeshOptions& m) {
  if (m.family == "file") {
    if (m.file.empty()) {
      throw std::invalid_argument("--family file needs --mesh <path>");
    }
    return read_mesh(m.file);
  }
  switch (parse_family(m.family)) {
    case MeshFamily::Voronoi: return generate_voronoi_mesh(m.seeds, m.lloyd, m.seed);
    case MeshFamily::Distorted:
      if (m.n < 2) throw std::invalid_argument("distorted mesh needs --n >= 2");
      return generate_distorted_square_mesh(m.n, m.distortion, m.seed);
    case MeshFamily::Concave: return generate_concave_mesh(m.n);
    case MeshFamily::Square: return generate_square_mesh(m.n);
  }
  throw std::invalid_argument("unknown mesh family");
}

void print_quality(const PolyMesh& mesh) {
  const MeshQualityReport q = mesh_quality(mesh);
  std::printf("cells %d vertices %d h %.6e min_edge_ratio %.4f min_star_ratio %.4f "
              "max_cell_vertices %d area %.12f\n",
              q.num_cells, q.num_vertices, q.h, q.min_edge_ratio, q.min_star_ratio,
              q.max_cell_vertices, q.total_area);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual element solver for the Sobolev equation with convection"};
  app.require_subcommand(1);

  // mesh
  MeshOptions mesh_opt;
  std::string mesh_out = "mesh.txt";
  auto* mesh_cmd = app.add_subcommand("mesh", "generate a mesh file and print its quality");
  mesh_cmd->add_option("family", mesh_opt.family, "voronoi | distorted | concave | square")
      ->required()
      ->check(CLI::IsMember({"voronoi", "distorted", "concave", "square"}));
  add_mesh_options(mesh_cmd, mesh_opt, false);
  mesh_cmd->add_option("--out,-o", mesh_out, "output mesh file");

  // solve
  MeshOptions solve_mesh;
  TimeOptions solve_time;
  std::string solve_problem = "example1";
  int solve_k = 1;
  std::string solve_dir = ".";
  auto* solve_cmd = app.add_subcommand("solve", "solve on one mesh and report the errors");
  solve_cmd->add_option("--problem", solve_problem, "problem name")
      ->check(CLI::IsMember(problem_names()) | CLI::IsMember({"1", "2", "3"}));
  solve_cmd->add_option("--k", solve_k, "VEM order")->check(CLI::Range(1, 3));
  add_mesh_options(solve_cmd, solve_mesh, true);
  add_time_options(solve_cmd, solve_time);
  solve_cmd->add_option("--out-dir", solve_dir, "directory for the solution snapshot");

  // converge
  MeshOptions conv_mesh;
  TimeOptions conv_time;
  std::string conv_problem = "example1";
  std::vector<int> conv_k{1, 2, 3};
  int conv_levels = 4;
  int conv_start = 0;
  int conv_base = 0;
  std::string conv_dir = ".";
  bool conv_no_plot = false;
  auto* conv_cmd = app.add_subcommand("converge", "convergence sweep over a mesh ladder");
  conv_cmd->add_option("--problem", conv_problem, "problem name")
      ->check(CLI::IsMember(problem_names()) | CLI::IsMember({"1", "2", "3"}));
  conv_cmd->add_option("--family", conv_mesh.family, "voronoi | distorted | concave | square")
      ->check(CLI::IsMember({"voronoi", "distorted", "concave", "square"}));
  conv_cmd->add_option("--k", conv_k, "VEM orders")->check(CLI::Range(1, 3));
  conv_cmd->add_option("--levels", conv_levels, "refinement levels")->check(CLI::Range(1, 8));
  conv_cmd->add_option("--start", conv_start, "first ladder level")->check(CLI::Range(0, 8));
  conv_cmd->add_option("--base", conv_base, "level-0 cells per side (seeds for voronoi), 0 = family default")
      ->check(CLI::Range(0, 4096));
  conv_cmd->add_option("--lloyd", conv_mesh.lloyd, "Lloyd iterations")->check(CLI::Range(0, 1000));
  conv_cmd->add_option("--distortion", conv_mesh.distortion, "distortion fraction")
      ->check(CLI::Range(0.0, 0.4999999));
  conv_cmd->add_option("--seed", conv_mesh.seed, "random seed");
  add_time_options(conv_cmd, conv_time);
  conv_cmd->add_option("--out-dir", conv_dir, "directory for CSV and SVG output");
  conv_cmd->add_flag("--no-plot", conv_no_plot, "skip the SVG plot");

  // adaptive
  AdaptiveConfig adapt;
  TimeOptions adapt_time;
  std::string adapt_dir = ".";
  bool adapt_no_plot = false;
  auto* adapt_cmd = app.add_subcommand("adaptive", "uniform versus adaptive refinement study");
  adapt_cmd->add_option("--problem", adapt.problem, "problem name")
      ->check(CLI::IsMember(problem_names()) | CLI::IsMember({"1", "2", "3"}));
  adapt_cmd->add_option("--k", adapt.k, "VEM order")->check(CLI::Range(1, 3));
  adapt_cmd->add_option("--initial-n", adapt.initial_n, "initial square mesh size")
      ->check(CLI::Range(2, 1024));
  adapt_cmd->add_option("--levels", adapt.uniform_levels, "uniform refinement levels")
      ->check(CLI::Range(1, 8));
  adapt_cmd->add_option("--theta", adapt.theta, "Doerfler marking fraction")
      ->check(CLI::Range(0.0, 1.0));
  adapt_cmd->add_option("--max-cycles", adapt.max_cycles, "bound on adaptive cycles")
      ->check(CLI::Range(1, 10000));
  add_time_options(adapt_cmd, adapt_time);
  adapt_cmd->add_option("--out-dir", adapt_dir, "directory for CSV, SVG and mesh output");
  adapt_cmd->add_flag("--no-plot", adapt_no_plot, "skip the SVG plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*mesh_cmd) {
      const PolyMesh mesh = make_mesh(mesh_opt);
      write_mesh(mesh_out, mesh);
      print_quality(mesh);
      std::printf("wrote %s\n", mesh_out.c_str());
    } else if (*solve_cmd) {
      const TimeStepperConfig time = to_config(solve_time);
      const PolyMesh mesh = make_mesh(solve_mesh);
      const CoefficientField field = make_problem(solve_problem);
      const SolveOutput out = solve_on_mesh(mesh, field, solve_k, time);
      ensure_dir(solve_dir);
      const std::string sol = (fs::path(solve_dir) / "solution.txt").string();
      const std::string poly = (fs::path(solve_dir) / "cellpoly.txt").string();
      write_solution(sol, out.U);
      write_cell_polynomials(poly, out.system, out.U);
      std::printf("h E0h E1h\n%.6e %.6e %.6e\n", out.errors.h, out.errors.E0, out.errors.E1);
      std::printf("dofs %d active %d seconds %.3f\n", out.errors.dofs, out.errors.active_dofs,
                  out.errors.seconds);
      std::printf("wrote %s %s\n", sol.c_str(), poly.c_str());
    } else if (*conv_cmd) {
      SweepConfig sweep;
      sweep.problem = conv_problem;
      sweep.levels = conv_levels;
      sweep.time = to_config(conv_time);
      sweep.ladder.family = parse_family(conv_mesh.family);
      sweep.ladder.start = conv_start;
      sweep.ladder.base = conv_base;
      sweep.ladder.distortion = conv_mesh.distortion;
      sweep.ladder.lloyd = conv_mesh.lloyd;
      sweep.ladder.seed = conv_mesh.seed;
      ensure_dir(conv_dir);
      std::vector<PlotSeries> series;
      std::string stem;
      for (int k : conv_k) {
        sweep.k = k;
        const ConvergenceRecord rec = run_convergence_sweep(sweep);
        stem = rec.problem + "_" + rec.family;
        const std::string csv = (fs::path(conv_dir) / (stem + "_k" + std::to_string(k) + ".csv"))
                                    .string();
        write_convergence_csv(csv, rec);
        std::cout << format_convergence_csv(rec);
        std::printf("wrote %s\n", csv.c_str());
        PlotSeries e0{"E0h k=" + std::to_string(k), {}, {}};
        PlotSeries e1{"E1h k=" + std::to_string(k), {}, {}};
        for (const auto& row : rec.rows) {
          e0.x.push_back(row.errors.h);
          e0.y.push_back(row.errors.E0);
          e1.x.push_back(row.errors.h);
          e1.y.push_back(row.errors.E1);
        }
        series.push_back(e0);
        series.push_back(e1);
      }
      if (conv_no_plot) {
        // nothing
      } else if (conv_levels < 2) {
        warn("a single level has no slope; skipping the SVG plot");
      } else {
        PlotOptions opt;
        opt.title = stem + " convergence";
        opt.x_label = "h";
        opt.y_label = "error";
        opt.x_decreasing = true;
        for (int k : conv_k) {
          for (double s : {double(k), double(k + 1)}) {
            if (std::find(opt.reference_slopes.begin(), opt.reference_slopes.end(), s) ==
                opt.reference_slopes.end()) {
              opt.reference_slopes.push_back(s);
            }
          }
        }
        const std::string svg = (fs::path(conv_dir) / (stem + ".svg")).string();
        write_text_file(svg, format_loglog_svg(series, opt));
        std::printf("wrote %s\n", svg.c_str());
      }
    } else if (*adapt_cmd) {
      adapt.time = to_config(adapt_time);
      const AdaptiveStudy study = run_adaptive_study(adapt);
      ensure_dir(adapt_dir);
      const std::string csv = (fs::path(adapt_dir) / "adaptive.csv").string();
      const std::string mesh_path = (fs::path(adapt_dir) / "adaptive_mesh.txt").string();
      write_text_file(csv, format_adaptive_csv(study));
      write_mesh(mesh_path, study.final_mesh);
      std::cout << format_adaptive_csv(study);
      std::printf("wrote %s %s\n", csv.c_str(), mesh_path.c_str());
      const bool plottable = study.uniform.size() >= 2 || study.adaptive.size() >= 2;
      if (!adapt_no_plot && plottable) {
        PlotSeries u{"uniform", {}, {}}, a{"adaptive", {}, {}};
        for (const auto& p : study.uniform) {
          u.x.push_back(p.errors.active_dofs);
          u.y.push_back(p.errors.E0);
        }
        for (const auto& p : study.adaptive) {
          a.x.push_back(p.errors.active_dofs);
          a.y.push_back(p.errors.E0);
        }
        PlotOptions opt;
        opt.title = "uniform vs adaptive refinement";
        opt.x_label = "active DOFs";
        opt.y_label = "E0h";
        const std::string svg = (fs::path(adapt_dir) / "adaptive.svg").string();
        write_text_file(svg, format_loglog_svg({u, a}, opt));
        std::printf("wrote %s\n", svg.c_str());
      } else if (!adapt_no_plot) {
        warn("a single level has no slope; skipping the SVG plot");
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
