#include "sobvem/mesh.hpp"

#include "polygon_clip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace sobvem {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Point& a, const Point& b, const Point& c) { return cross(b - a, c - a); }

bool on_segment(const Point& a, const Point& b, const Point& p, double tol) {
  return std::abs(orient(a, b, p)) <= tol && p.x() >= std::min(a.x(), b.x()) - tol &&
         p.x() <= std::max(a.x(), b.x()) + tol && p.y() >= std::min(a.y(), b.y()) - tol &&
         p.y() <= std::max(a.y(), b.y()) + tol;
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& p3, const Point& p4,
                        double tol) {
  const double d1 = orient(p3, p4, p1);
  const double d2 = orient(p3, p4, p2);
  const double d3 = orient(p1, p2, p3);
  const double d4 = orient(p1, p2, p4);
  if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
      ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))) {
    return true;
  }
  return on_segment(p3, p4, p1, tol) || on_segment(p3, p4, p2, tol) ||
         on_segment(p1, p2, p3, tol) || on_segment(p1, p2, p4, tol);
}

std::vector<Point> cell_points(const PolyMesh& mesh, int c) {
  std::vector<Point> pts;
  pts.reserve(mesh.cell(c).size());
  for (int v : mesh.cell(c)) {
    pts.push_back(mesh.vertex(v));
  }
  return pts;
}

} // namespace

double signed_area(const std::vector<Point>& loop) {
  const std::size_t n = loop.size();
  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a += cross(loop[i], loop[(i + 1) % n]);
  }
  return 0.5 * a;
}

bool is_simple_polygon(const std::vector<Point>& loop) {
  const std::size_t n = loop.size();
  if (n < 3) {
    return false;
  }
  double scale = 0.0;
  for (const auto& p : loop) {
    scale = std::max(scale, (p - loop[0]).norm());
  }
  const double tol = 1e-13 * scale * scale;
  for (std::size_t i = 0; i < n; ++i) {
    if ((loop[(i + 1) % n] - loop[i]).norm() <= 1e-14 * scale) {
      return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = loop[i];
    const Point& b = loop[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Point& c = loop[j];
      const Point& d = loop[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share one endpoint; they must not fold back.
        const Point& shared = (j == i + 1) ? b : a;
        const Point& other_i = (j == i + 1) ? a : b;
        const Point& other_j = (j == i + 1) ? d : c;
        const Point u = other_i - shared;
        const Point w = other_j - shared;
        if (std::abs(cross(u, w)) <= tol && u.dot(w) > 0.0) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a, b, c, d, tol)) {
        return false;
      }
    }
  }
  return true;
}

PolyMesh::PolyMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  const int nv = num_vertices();
  auto& edge_index = edge_lookup_;
  cell_edges_.resize(cells_.size());
  for (int c = 0; c < num_cells(); ++c) {
    const auto& loop = cells_[c];
    if (loop.size() < 3) {
      throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices");
    }
    for (int v : loop) {
      if (v < 0 || v >= nv) {
        throw MeshError("cell " + std::to_string(c) + " references vertex " + std::to_string(v) +
                        " out of range");
      }
    }
    const auto pts = cell_points(*this, c);
    if (signed_area(pts) <= 1e-14) {
      throw MeshError("cell " + std::to_string(c) + " is degenerate or not counter-clockwise");
    }
    if (!is_simple_polygon(pts)) {
      throw MeshError("cell " + std::to_string(c) + " is not a simple polygon");
    }
    const int n = static_cast<int>(loop.size());
    cell_edges_[c].resize(n);
    for (int i = 0; i < n; ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % n];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_index.emplace(std::pair{key.first, key.second},
                                               static_cast<int>(edges_.size()));
      if (inserted) {
        Edge e;
        e.vertices = {key.first, key.second};
        e.cells = {c, -1};
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.cells[1] >= 0 || e.cells[0] == c) {
          throw MeshError("edge (" + std::to_string(key.first) + "," +
                          std::to_string(key.second) + ") is shared by more than two cells");
        }
        e.cells[1] = c;
      }
      cell_edges_[c][i] = it->second;
    }
  }
  boundary_vertex_.assign(nv, 0);
  for (const auto& e : edges_) {
    if (e.on_boundary()) {
      boundary_vertex_[e.vertices[0]] = 1;
      boundary_vertex_[e.vertices[1]] = 1;
    }
  }
}

int PolyMesh::find_edge(int a, int b) const {
  const auto key = std::minmax(a, b);
  const auto it = edge_lookup_.find({key.first, key.second});
  return it == edge_lookup_.end() ? -1 : it->second;
}

CellGeometry compute_polygon_geometry(const std::vector<Point>& loop) {
  CellGeometry g;
  g.vertices = loop;
  const int n = static_cast<int>(loop.size());
  // Shift to the first vertex to reduce cancellation in the moments.
  const Point origin = loop[0];
  double area2 = 0.0;
  Point moment = Point::Zero();
  for (int i = 0; i < n; ++i) {
    const Point p = loop[i] - origin;
    const Point q = loop[(i + 1) % n] - origin;
    const double w = cross(p, q);
    area2 += w;
    moment += w * (p + q);
  }
  g.area = 0.5 * area2;
  if (!(g.area > 1e-14)) {
    throw MeshError("degenerate cell (area " + std::to_string(g.area) + ")");
  }
  g.centroid = origin + moment / (3.0 * area2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      g.diameter = std::max(g.diameter, (loop[i] - loop[j]).norm());
    }
  }
  g.edge_lengths.resize(n);
  g.edge_normals.resize(n);
  for (int i = 0; i < n; ++i) {
    const Point t = loop[(i + 1) % n] - loop[i];
    const double len = t.norm();
    g.edge_lengths[i] = len;
    g.edge_normals[i] = Point(t.y(), -t.x()) / len;
  }
  return g;
}

CellGeometry compute_cell_geometry(const PolyMesh& mesh, int c) {
  try {
    return compute_polygon_geometry(cell_points(mesh, c));
  } catch (const MeshError& err) {
    throw MeshError("cell " + std::to_string(c) + ": " + err.what());
  }
}

namespace {

// Radius of the largest disk centred at the kernel centroid that stays inside
// the kernel; zero when the kernel is empty.
double kernel_disk_radius(const CellGeometry& g) {
  std::vector<Point> kernel = g.vertices;
  const int n = g.num_vertices();
  for (int i = 0; i < n && !kernel.empty(); ++i) {
    kernel = detail::clip_half_plane(kernel, g.edge_normals[i], g.edge_normals[i].dot(g.vertices[i]));
  }
  std::vector<Point> pruned;
  for (const auto& p : kernel) {
    if (pruned.empty() || (p - pruned.back()).norm() > 1e-14 * g.diameter) {
      pruned.push_back(p);
    }
  }
  while (pruned.size() > 1 && (pruned.front() - pruned.back()).norm() <= 1e-14 * g.diameter) {
    pruned.pop_back();
  }
  if (pruned.size() < 3 || signed_area(pruned) <= 1e-14 * g.area) {
    return 0.0;
  }
  const CellGeometry kg = compute_polygon_geometry(pruned);
  double r = std::numeric_limits<double>::max();
  for (int i = 0; i < kg.num_vertices(); ++i) {
    r = std::min(r, kg.edge_normals[i].dot(kg.vertices[i] - kg.centroid));
  }
  return std::max(r, 0.0);
}

} // namespace

MeshQualityReport mesh_quality(const PolyMesh& mesh) {
  MeshQualityReport r;
  r.num_cells = mesh.num_cells();
  r.num_vertices = mesh.num_vertices();
  r.min_edge_ratio = std::numeric_limits<double>::max();
  r.min_star_ratio = std::numeric_limits<double>::max();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto g = compute_cell_geometry(mesh, c);
    r.h = std::max(r.h, g.diameter);
    r.total_area += g.area;
    r.max_cell_vertices = std::max(r.max_cell_vertices, g.num_vertices());
    for (double len : g.edge_lengths) {
      r.min_edge_ratio = std::min(r.min_edge_ratio, len / g.diameter);
    }
    r.min_star_ratio = std::min(r.min_star_ratio, kernel_disk_radius(g) / g.diameter);
  }
  return r;
}

std::vector<int> geometric_corners(const PolyMesh& mesh, int c) {
  const auto& loop = mesh.cell(c);
  const int n = static_cast<int>(loop.size());
  std::vector<int> corners;
  for (int i = 0; i < n; ++i) {
    const Point& prev = mesh.vertex(loop[(i + n - 1) % n]);
    const Point& cur = mesh.vertex(loop[i]);
    const Point& next = mesh.vertex(loop[(i + 1) % n]);
    const Point u = cur - prev;
    const Point w = next - cur;
    if (std::abs(cross(u, w)) > 1e-10 * u.norm() * w.norm()) {
      corners.push_back(i);
    }
  }
  return corners;
}

bool is_reflex_vertex(const PolyMesh& mesh, int c, int i) {
  const auto& loop = mesh.cell(c);
  const int n = static_cast<int>(loop.size());
  const Point& prev = mesh.vertex(loop[(i + n - 1) % n]);
  const Point& cur = mesh.vertex(loop[i]);
  const Point& next = mesh.vertex(loop[(i + 1) % n]);
  const Point u = cur - prev;
  const Point w = next - cur;
  return cross(u, w) < -1e-10 * u.norm() * w.norm();
}

bool is_convex_cell(const PolyMesh& mesh, int c) {
  const int n = static_cast<int>(mesh.cell(c).size());
  for (int i = 0; i < n; ++i) {
    if (is_reflex_vertex(mesh, c, i)) {
      return false;
    }
  }
  return true;
}

std::uint64_t connectivity_hash(const PolyMesh& mesh) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint64_t value) {
    for (int b = 0; b < 8; ++b) {
      h ^= (value >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(mesh.num_vertices()));
  mix(static_cast<std::uint64_t>(mesh.num_cells()));
  for (const auto& loop : mesh.cells()) {
    mix(loop.size());
    for (int v : loop) {
      mix(static_cast<std::uint64_t>(v));
    }
  }
  return h;
}

} // namespace sobvem
