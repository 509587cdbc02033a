#include "sobvem/quadrature.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace sobvem {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) {
    throw std::invalid_argument("gauss_legendre: n must be positive");
  }
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

void gauss_lobatto(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 2) {
    throw std::invalid_argument("gauss_lobatto: n must be at least 2");
  }
  const int N = n - 1;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = -std::cos(std::numbers::pi * i / N);
  }
  std::vector<double> pN(n), pNm1(n);
  for (int it = 0; it < 200; ++it) {
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      double p0 = 1.0;
      double p1 = x[i];
      for (int k = 2; k <= N; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x[i] * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pN[i] = p1;
      pNm1[i] = p0;
      if (i == 0 || i == N) {
        continue;
      }
      const double dx = (x[i] * pN[i] - pNm1[i]) / (n * pN[i]);
      x[i] -= dx;
      change = std::max(change, std::abs(dx));
    }
    if (change < 1e-16) {
      break;
    }
  }
  nodes = x;
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double p0 = 1.0;
    double p1 = x[i];
    for (int k = 2; k <= N; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x[i] * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    weights[i] = 2.0 / (N * n * p1 * p1);
  }
}

namespace {

TriangleRule make_triangle_rule(int order) {
  TriangleRule rule;
  rule.order = order;
  // Degree d in (x, y) becomes degree d+1 in u (Jacobian 1-u) and d in v.
  const int n = std::max(1, (order + 3) / 2);
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (gx[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (gx[j] + 1.0);
      const double x = u;
      const double y = v * (1.0 - u);
      // 0.25 from the interval maps, times 2 to normalise the area to one.
      rule.weights.push_back(0.5 * gw[i] * gw[j] * (1.0 - u));
      rule.points.push_back({1.0 - x - y, x, y});
    }
  }
  return rule;
}

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

bool strictly_inside_or_on(const Point& p, const Point& a, const Point& b, const Point& c,
                           double tol) {
  return cross(b - a, p - a) >= -tol && cross(c - b, p - b) >= -tol && cross(a - c, p - c) >= -tol;
}

std::vector<std::array<Point, 3>> ear_clip(const std::vector<Point>& loop) {
  std::vector<int> idx(loop.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = static_cast<int>(i);
  }
  double scale = 0.0;
  for (const auto& p : loop) {
    scale = std::max(scale, (p - loop[0]).norm());
  }
  const double tol = 1e-14 * scale * scale;
  std::vector<std::array<Point, 3>> tris;
  while (idx.size() > 3) {
    const int m = static_cast<int>(idx.size());
    bool clipped = false;
    for (int i = 0; i < m && !clipped; ++i) {
      const Point& a = loop[idx[(i + m - 1) % m]];
      const Point& b = loop[idx[i]];
      const Point& c = loop[idx[(i + 1) % m]];
      if (cross(b - a, c - b) <= tol) {
        continue;  // reflex or flat
      }
      bool empty = true;
      for (int j = 0; j < m && empty; ++j) {
        if (j == i || j == (i + 1) % m || j == (i + m - 1) % m) {
          continue;
        }
        const Point& p = loop[idx[j]];
        if (strictly_inside_or_on(p, a, b, c, tol)) {
          empty = false;
        }
      }
      if (empty) {
        tris.push_back({a, b, c});
        idx.erase(idx.begin() + i);
        clipped = true;
      }
    }
    if (!clipped) {
      throw MeshError("ear clipping failed: polygon is tangled or degenerate");
    }
  }
  tris.push_back({loop[idx[0]], loop[idx[1]], loop[idx[2]]});
  return tris;
}

} // namespace

const TriangleRule& triangle_rule(int order) {
  constexpr int max_order = 40;
  if (order < 0 || order > max_order) {
    throw std::invalid_argument("triangle_rule: order out of range");
  }
  static std::array<TriangleRule, max_order + 1> cache;
  static std::array<std::once_flag, max_order + 1> flags;
  std::call_once(flags[order], [order] { cache[order] = make_triangle_rule(order); });
  return cache[order];
}

std::vector<std::array<Point, 3>> triangulate_polygon(const std::vector<Point>& loop) {
  const CellGeometry g = compute_polygon_geometry(loop);
  const int n = g.num_vertices();
  const double tol = 1e-12 * g.area;
  bool fan_ok = true;
  for (int i = 0; i < n && fan_ok; ++i) {
    fan_ok = 0.5 * cross(loop[i] - g.centroid, loop[(i + 1) % n] - g.centroid) > tol;
  }
  if (fan_ok) {
    std::vector<std::array<Point, 3>> tris;
    tris.reserve(n);
    for (int i = 0; i < n; ++i) {
      tris.push_back({g.centroid, loop[i], loop[(i + 1) % n]});
    }
    return tris;
  }
  return ear_clip(loop);
}

PolygonRule polygon_rule(const std::vector<Point>& loop, int order) {
  const TriangleRule& ref = triangle_rule(std::max(order, 0));
  PolygonRule rule;
  const auto tris = triangulate_polygon(loop);
  rule.points.reserve(tris.size() * ref.points.size());
  rule.weights.reserve(tris.size() * ref.points.size());
  for (const auto& t : tris) {
    const double area = 0.5 * cross(t[1] - t[0], t[2] - t[0]);
    for (std::size_t q = 0; q < ref.points.size(); ++q) {
      const auto& l = ref.points[q];
      rule.points.push_back(l[0] * t[0] + l[1] * t[1] + l[2] * t[2]);
      rule.weights.push_back(ref.weights[q] * area);
    }
  }
  return rule;
}

PolygonRule polygon_rule(const PolyMesh& mesh, int c, int order) {
  std::vector<Point> loop;
  for (int v : mesh.cell(c)) {
    loop.push_back(mesh.vertex(v));
  }
  PolygonRule rule;
  try {
    rule = polygon_rule(loop, order);
  } catch (const MeshError& err) {
    throw MeshError("cell " + std::to_string(c) + ": " + err.what());
  }
  rule.cell = c;
  return rule;
}

EdgeRule edge_gauss_lobatto(const Point& a, const Point& b, int npoints) {
  const double len = (b - a).norm();
  if (!(len > 0.0)) {
    throw MeshError("edge_gauss_lobatto: zero-length edge");
  }
  EdgeRule rule;
  std::vector<double> w;
  gauss_lobatto(npoints, rule.reference, w);
  rule.points.reserve(npoints);
  rule.weights.reserve(npoints);
  for (int i = 0; i < npoints; ++i) {
    const double s = 0.5 * (rule.reference[i] + 1.0);
    rule.points.push_back(a + s * (b - a));
    rule.weights.push_back(0.5 * len * w[i]);
  }
  return rule;
}

} // namespace sobvem
