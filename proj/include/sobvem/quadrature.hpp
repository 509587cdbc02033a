#pragma once

#include "sobvem/mesh.hpp"

#include <array>
#include <vector>

namespace sobvem {

/// Collapsed Gauss product rule on the reference triangle. Weights sum
/// to one; points are barycentric triples.
struct TriangleRule {
  int order = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// Quadrature rule in physical coordinates over one polygonal cell.
struct PolygonRule {
  int cell = -1;
  std::vector<Point> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Lobatto rule on a physical edge, endpoints included.
struct EdgeRule {
  std::vector<Point> points;
  std::vector<double> weights;      // physical weights (sum to |e|)
  std::vector<double> reference;    // nodes on [-1, 1]
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss-Lobatto nodes (ascending, including +-1) and weights on [-1, 1].
void gauss_lobatto(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Cached rule exact for bivariate polynomials of total degree <= order.
const TriangleRule& triangle_rule(int order);

/// Triangulation of a simple CCW polygon: centroid fan when the polygon is
/// star-shaped with respect to its centroid, ear clipping otherwise.
std::vector<std::array<Point, 3>> triangulate_polygon(const std::vector<Point>& loop);

/// Physical rule over cell `c`, exact for polynomials of degree <= order.
PolygonRule polygon_rule(const PolyMesh& mesh, int c, int order);
PolygonRule polygon_rule(const std::vector<Point>& loop, int order);

/// npoints-point Gauss-Lobatto rule on the segment [a, b]; exact for
/// polynomials of degree <= 2 * npoints - 3 along the edge.
EdgeRule edge_gauss_lobatto(const Point& a, const Point& b, int npoints);

} // namespace sobvem
