#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sobvem {

using Point = Eigen::Vector2d;

/// Raised for invalid or degenerate mesh input.
class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A mesh edge: the two endpoint vertices (lower index first) and the one or
/// two cells it bounds. `cells[1] == -1` marks a boundary edge.
struct Edge {
  std::array<int, 2> vertices{};
  std::array<int, 2> cells{-1, -1};

  bool on_boundary() const { return cells[1] < 0; }
};

/// Polygonal mesh of a planar domain. Cells are counter-clockwise vertex
/// loops; edges and boundary flags are derived at construction.
///
/// The mesh is immutable once built. Construction validates every cell
/// (>= 3 vertices, simple, positive signed area) and the edge adjacency
/// (at most two cells per edge).
class PolyMesh {
public:
  PolyMesh() = default;
  PolyMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int v) const { return vertices_[v]; }
  const std::vector<std::vector<int>>& cells() const { return cells_; }
  const std::vector<int>& cell(int c) const { return cells_[c]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

  /// Edge indices of cell `c`, where entry i is the edge from loop vertex i
  /// to loop vertex i+1.
  const std::vector<int>& cell_edges(int c) const { return cell_edges_[c]; }

  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  bool is_boundary_edge(int e) const { return edges_[e].on_boundary(); }
  const std::vector<char>& boundary_vertex_flags() const { return boundary_vertex_; }

  /// Index of the edge joining vertices a and b, or -1.
  int find_edge(int a, int b) const;

private:
  std::vector<Point> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> cell_edges_;
  std::vector<char> boundary_vertex_;
  std::map<std::pair<int, int>, int> edge_lookup_;
};

/// Geometric quantities of one cell.
struct CellGeometry {
  double area = 0.0;
  Point centroid = Point::Zero();
  double diameter = 0.0;
  std::vector<Point> vertices;         // CCW loop
  std::vector<double> edge_lengths;    // edge i joins vertex i and i+1
  std::vector<Point> edge_normals;     // outward unit normals

  int num_vertices() const { return static_cast<int>(vertices.size()); }
};

struct MeshQualityReport {
  double h = 0.0;                  // max cell diameter
  double min_edge_ratio = 0.0;     // min |e| / h_K
  double min_star_ratio = 0.0;     // min inscribed-disk radius estimate / h_K
  double total_area = 0.0;
  int num_cells = 0;
  int num_vertices = 0;
  int max_cell_vertices = 0;
};

double signed_area(const std::vector<Point>& loop);
bool is_simple_polygon(const std::vector<Point>& loop);

/// Shoelace area, area centroid, diameter and edge data of cell `c`.
/// Throws MeshError if the cell area is <= 1e-14.
CellGeometry compute_cell_geometry(const PolyMesh& mesh, int c);
CellGeometry compute_polygon_geometry(const std::vector<Point>& loop);

MeshQualityReport mesh_quality(const PolyMesh& mesh);

/// Positions in the cell loop whose interior angle differs from pi, i.e. the
/// geometric corners. Collinear (hanging) vertices are skipped.
std::vector<int> geometric_corners(const PolyMesh& mesh, int c);

/// Whether loop vertex `i` of cell `c` is a reflex vertex.
bool is_reflex_vertex(const PolyMesh& mesh, int c, int i);

bool is_convex_cell(const PolyMesh& mesh, int c);

/// FNV-1a hash of the cell loops and vertex count.
std::uint64_t connectivity_hash(const PolyMesh& mesh);

// ---------------------------------------------------------------------------
// Generators

/// n x n uniform square mesh of the unit square.
PolyMesh generate_square_mesh(int n);

/// n x n quadrilateral mesh of [0,1]^2 with interior vertices perturbed by
/// uniform offsets up to distortion/n per coordinate. Boundary vertices slide
/// along their side; corners stay fixed.
PolyMesh generate_distorted_square_mesh(int n, double distortion, std::uint64_t seed);

/// Bounded Voronoi diagram of `n_seeds` jittered-grid seeds in [0,1]^2,
/// followed by `lloyd_iterations` Lloyd steps.
PolyMesh generate_voronoi_mesh(int n_seeds, int lloyd_iterations, std::uint64_t seed);

/// Bounded Voronoi diagram of explicit seed points, clipped to [0,1]^2.
PolyMesh build_clipped_voronoi(std::vector<Point> seeds, int lloyd_iterations = 0);

/// Each of the n x n blocks split into two congruent non-convex hexagons by a
/// point-symmetric zigzag interface.
PolyMesh generate_concave_mesh(int n);

/// Splits each marked quadrilateral-derived cell into four children through
/// its side midpoints and the average of its four corners. Unmarked
/// neighbours keep their polygon and gain the new midpoint as a hanging
/// vertex.
PolyMesh refine_cells(const PolyMesh& mesh, const std::set<int>& marked);

// ---------------------------------------------------------------------------
// I/O (text format "polymesh 1")

PolyMesh read_mesh(const std::string& path);
void write_mesh(const std::string& path, const PolyMesh& mesh);
PolyMesh parse_mesh(const std::string& text);
std::string format_mesh(const PolyMesh& mesh);

} // namespace sobvem
