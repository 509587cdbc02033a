#include "sobvem/mesh.hpp"

#include "polygon_clip.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

namespace sobvem {

namespace {

std::vector<Point> unit_square() {
  return {Point(0.0, 0.0), Point(1.0, 0.0), Point(1.0, 1.0), Point(0.0, 1.0)};
}

double snap_unit(double x) {
  if (std::abs(x) < 1e-12) {
    return 0.0;
  }
  if (std::abs(x - 1.0) < 1e-12) {
    return 1.0;
  }
  return x;
}

bool on_unit_square_boundary(const Point& p) {
  constexpr double tol = 1e-12;
  return std::abs(p.x()) < tol || std::abs(p.y()) < tol || std::abs(p.x() - 1.0) < tol ||
         std::abs(p.y() - 1.0) < tol;
}

// A mesh of [0,1]^2 is conforming when every boundary edge lies on the square
// boundary; anything else is a T-junction or a gap.
void check_unit_square_tiling(const PolyMesh& mesh, const char* generator) {
  for (const auto& e : mesh.edges()) {
    if (!e.on_boundary()) {
      continue;
    }
    const Point& a = mesh.vertex(e.vertices[0]);
    const Point& b = mesh.vertex(e.vertices[1]);
    const Point mid = 0.5 * (a + b);
    if (!on_unit_square_boundary(a) || !on_unit_square_boundary(b) ||
        !on_unit_square_boundary(mid)) {
      throw MeshError(std::string(generator) + ": non-conforming edge inside the domain");
    }
  }
}

/// Merges points closer than `tol` using a bucket grid.
class VertexPool {
public:
  explicit VertexPool(double tol) : tol_(tol) {}

  int insert(const Point& p) {
    const auto key = bucket(p);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = buckets_.find(hash(key.first + dx, key.second + dy));
        if (it == buckets_.end()) {
          continue;
        }
        for (int idx : it->second) {
          if ((points_[idx] - p).norm() <= tol_) {
            return idx;
          }
        }
      }
    }
    const int idx = static_cast<int>(points_.size());
    points_.push_back(p);
    buckets_[hash(key.first, key.second)].push_back(idx);
    return idx;
  }

  std::vector<Point> take() { return std::move(points_); }

private:
  std::pair<long, long> bucket(const Point& p) const {
    return {static_cast<long>(std::floor(p.x() / (4.0 * tol_))),
            static_cast<long>(std::floor(p.y() / (4.0 * tol_)))};
  }
  static std::uint64_t hash(long a, long b) {
    return (static_cast<std::uint64_t>(a) * 0x9E3779B97F4A7C15ull) ^
           (static_cast<std::uint64_t>(b) + 0x632BE59BD9B4E019ull);
  }

  double tol_;
  std::vector<Point> points_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

std::vector<Point> voronoi_cell(const std::vector<Point>& seeds, int i,
                                const std::vector<int>& order) {
  std::vector<Point> poly = unit_square();
  const Point& si = seeds[i];
  double reach = 0.0;
  for (const auto& p : poly) {
    reach = std::max(reach, (p - si).norm());
  }
  for (int j : order) {
    if (j == i) {
      continue;
    }
    const Point& sj = seeds[j];
    const double dist = (sj - si).norm();
    // Seeds farther than twice the current cell radius cannot cut it.
    if (dist > 2.0 * reach) {
      break;
    }
    const Point normal = sj - si;
    const double offset = 0.5 * (sj.squaredNorm() - si.squaredNorm());
    poly = detail::clip_half_plane(poly, normal, offset);
    reach = 0.0;
    for (const auto& p : poly) {
      reach = std::max(reach, (p - si).norm());
    }
  }
  return poly;
}

std::vector<std::vector<Point>> voronoi_cells(const std::vector<Point>& seeds) {
  const int n = static_cast<int>(seeds.size());
  std::vector<std::vector<Point>> cells(n);
  std::vector<int> order(n);
  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      dist[j] = (seeds[j] - seeds[i]).squaredNorm();
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });
    cells[i] = voronoi_cell(seeds, i, order);
  }
  return cells;
}

bool has_duplicate_seeds(const std::vector<Point>& seeds) {
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t j = i + 1; j < seeds.size(); ++j) {
      if ((seeds[i] - seeds[j]).norm() < 1e-12) {
        return true;
      }
    }
  }
  return false;
}

} // namespace

PolyMesh generate_square_mesh(int n) {
  return generate_distorted_square_mesh(n, 0.0, 0);
}

PolyMesh generate_distorted_square_mesh(int n, double distortion, std::uint64_t seed) {
  if (n < 1) {
    throw MeshError("distorted square mesh needs n >= 1");
  }
  if (distortion < 0.0 || distortion >= 0.5) {
    throw MeshError("distortion must lie in [0, 0.5)");
  }
  const int nv = n + 1;
  auto vid = [nv](int i, int j) { return j * nv + i; };
  std::vector<Point> verts(static_cast<std::size_t>(nv) * nv);
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nv; ++i) {
      verts[vid(i, j)] = Point(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  if (distortion > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> offset(-distortion / n, distortion / n);
    auto cell_ok = [&](int ci, int cj) {
      if (ci < 0 || cj < 0 || ci >= n || cj >= n) {
        return true;
      }
      std::vector<Point> loop;
      for (int v : cells[cj * n + ci]) {
        loop.push_back(verts[v]);
      }
      return signed_area(loop) > 0.0 && is_simple_polygon(loop);
    };
    for (int j = 0; j < nv; ++j) {
      for (int i = 0; i < nv; ++i) {
        const bool fix_x = (i == 0 || i == n);
        const bool fix_y = (j == 0 || j == n);
        if (fix_x && fix_y) {
          continue;
        }
        const Point base = verts[vid(i, j)];
        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
          const double dx = offset(rng);
          const double dy = offset(rng);
          verts[vid(i, j)] = base + Point(fix_x ? 0.0 : dx, fix_y ? 0.0 : dy);
          placed = cell_ok(i - 1, j - 1) && cell_ok(i, j - 1) && cell_ok(i - 1, j) && cell_ok(i, j);
        }
        if (!placed) {
          throw MeshError("distorted square mesh: vertex (" + std::to_string(i) + "," +
                          std::to_string(j) + ") tangles its cells after 100 retries");
        }
      }
    }
  }
  return PolyMesh(std::move(verts), std::move(cells));
}

PolyMesh build_clipped_voronoi(std::vector<Point> seeds, int lloyd_iterations) {
  if (seeds.size() < 2) {
    throw MeshError("Voronoi mesh needs at least two seeds");
  }
  for (const auto& s : seeds) {
    if (s.x() <= 0.0 || s.x() >= 1.0 || s.y() <= 0.0 || s.y() >= 1.0) {
      throw MeshError("Voronoi seeds must lie inside the unit square");
    }
  }
  std::mt19937_64 jitter_rng(0x5eed);
  std::uniform_real_distribution<double> jitter(-1e-7, 1e-7);
  for (int attempt = 0; has_duplicate_seeds(seeds); ++attempt) {
    if (attempt > 100) {
      throw MeshError("Voronoi mesh: could not separate duplicate seeds");
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      for (std::size_t j = i + 1; j < seeds.size(); ++j) {
        if ((seeds[i] - seeds[j]).norm() < 1e-12) {
          seeds[j] += Point(jitter(jitter_rng), jitter(jitter_rng));
        }
      }
    }
  }

  auto cells = voronoi_cells(seeds);
  for (int it = 0; it < lloyd_iterations; ++it) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      seeds[i] = compute_polygon_geometry(cells[i]).centroid;
    }
    cells = voronoi_cells(seeds);
  }

  // Stitch cells into a conforming mesh; vertices closer than 1e-9 merge,
  // which also collapses sliver edges.
  VertexPool pool(1e-9);
  std::vector<std::vector<int>> loops;
  loops.reserve(cells.size());
  for (const auto& poly : cells) {
    std::vector<int> loop;
    for (const auto& p : poly) {
      const int v = pool.insert(Point(snap_unit(p.x()), snap_unit(p.y())));
      if (loop.empty() || loop.back() != v) {
        loop.push_back(v);
      }
    }
    while (loop.size() > 1 && loop.front() == loop.back()) {
      loop.pop_back();
    }
    if (loop.size() >= 3) {
      loops.push_back(std::move(loop));
    }
  }
  PolyMesh mesh(pool.take(), std::move(loops));
  check_unit_square_tiling(mesh, "voronoi");
  return mesh;
}

PolyMesh generate_voronoi_mesh(int n_seeds, int lloyd_iterations, std::uint64_t seed) {
  if (n_seeds < 4) {
    throw MeshError("Voronoi mesh needs at least 4 seeds");
  }
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_seeds))));
  const int rows = (n_seeds + cols - 1) / cols;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.25, 0.25);
  std::vector<Point> seeds;
  seeds.reserve(n_seeds);
  for (int i = 0; i < n_seeds; ++i) {
    const int col = i % cols;
    const int row = i / cols;
    const double x = (col + 0.5 + u(rng)) / cols;
    const double y = (row + 0.5 + u(rng)) / rows;
    seeds.emplace_back(x, y);
  }
  return build_clipped_voronoi(std::move(seeds), lloyd_iterations);
}

PolyMesh generate_concave_mesh(int n) {
  if (n < 1) {
    throw MeshError("concave mesh needs n >= 1");
  }
  // Local coordinates in units of 1/8 of the block side. The interface runs
  // (0,4) -> (2,5) -> (6,3) -> (8,4) and is symmetric about the block centre.
  static const int lower[6][2] = {{0, 0}, {8, 0}, {8, 4}, {6, 3}, {2, 5}, {0, 4}};
  static const int upper[6][2] = {{0, 4}, {2, 5}, {6, 3}, {8, 4}, {8, 8}, {0, 8}};
  const double scale = 8.0 * n;
  std::map<std::pair<int, int>, int> index;
  std::vector<Point> verts;
  auto vertex = [&](int X, int Y) {
    auto [it, inserted] = index.emplace(std::pair{X, Y}, static_cast<int>(verts.size()));
    if (inserted) {
      verts.emplace_back(X / scale, Y / scale);
    }
    return it->second;
  };
  std::vector<std::vector<int>> cells;
  cells.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      for (const auto* piece : {lower, upper}) {
        std::vector<int> loop;
        for (int v = 0; v < 6; ++v) {
          loop.push_back(vertex(8 * i + piece[v][0], 8 * j + piece[v][1]));
        }
        cells.push_back(std::move(loop));
      }
    }
  }
  return PolyMesh(std::move(verts), std::move(cells));
}

PolyMesh refine_cells(const PolyMesh& mesh, const std::set<int>& marked) {
  for (int c : marked) {
    if (c < 0 || c >= mesh.num_cells()) {
      throw MeshError("refine_cells: cell " + std::to_string(c) + " does not exist");
    }
  }
  std::vector<Point> verts = mesh.vertices();
  std::map<std::pair<int, int>, int> split;  // old edge -> inserted midpoint

  auto midpoint_of = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = split.find({key.first, key.second});
    if (it != split.end()) {
      return it->second;
    }
    const int v = static_cast<int>(verts.size());
    verts.push_back(0.5 * (mesh.vertex(a) + mesh.vertex(b)));
    split.emplace(std::pair{key.first, key.second}, v);
    return v;
  };

  struct Side {
    std::vector<int> first;   // corner ... midpoint (inclusive)
    std::vector<int> second;  // midpoint ... next corner (exclusive)
  };
  std::map<int, std::array<Side, 4>> sides;
  for (int c : marked) {
    const auto& loop = mesh.cell(c);
    const int n = static_cast<int>(loop.size());
    const auto corners = geometric_corners(mesh, c);
    if (corners.size() != 4) {
      throw MeshError("refine_cells: cell " + std::to_string(c) +
                      " is not quadrilateral-derived (" + std::to_string(corners.size()) +
                      " corners)");
    }
    std::array<Side, 4> cell_sides;
    for (int s = 0; s < 4; ++s) {
      const int start = corners[s];
      const int stop = corners[(s + 1) % 4];
      std::vector<int> chain;
      for (int p = start;; p = (p + 1) % n) {
        chain.push_back(loop[p]);
        if (p == stop) {
          break;
        }
      }
      Side& side = cell_sides[s];
      if (chain.size() == 2) {
        const int m = midpoint_of(chain[0], chain[1]);
        side.first = {chain[0], m};
        side.second = {};
        continue;
      }
      const Point mid = 0.5 * (mesh.vertex(chain.front()) + mesh.vertex(chain.back()));
      const double len = (mesh.vertex(chain.back()) - mesh.vertex(chain.front())).norm();
      std::size_t at = 0;
      for (std::size_t q = 1; q + 1 < chain.size(); ++q) {
        if ((mesh.vertex(chain[q]) - mid).norm() <= 1e-9 * len) {
          at = q;
        }
      }
      if (at == 0) {
        throw MeshError("refine_cells: side of cell " + std::to_string(c) +
                        " carries hanging vertices but none at its midpoint");
      }
      side.first.assign(chain.begin(), chain.begin() + static_cast<long>(at) + 1);
      side.second.assign(chain.begin() + static_cast<long>(at) + 1, chain.end() - 1);
    }
    sides.emplace(c, std::move(cell_sides));
  }

  std::vector<std::vector<int>> cells;
  cells.reserve(mesh.num_cells() + 3 * marked.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto it = sides.find(c);
    if (it == sides.end()) {
      const auto& loop = mesh.cell(c);
      const int n = static_cast<int>(loop.size());
      std::vector<int> out;
      out.reserve(n + 4);
      for (int i = 0; i < n; ++i) {
        const int a = loop[i];
        const int b = loop[(i + 1) % n];
        out.push_back(a);
        const auto key = std::minmax(a, b);
        auto s = split.find({key.first, key.second});
        if (s != split.end()) {
          out.push_back(s->second);
        }
      }
      cells.push_back(std::move(out));
      continue;
    }
    const auto& cs = it->second;
    Point centre = Point::Zero();
    for (int s = 0; s < 4; ++s) {
      centre += mesh.vertex(cs[s].first.front());
    }
    const int centre_id = static_cast<int>(verts.size());
    verts.push_back(0.25 * centre);
    for (int s = 0; s < 4; ++s) {
      const Side& cur = cs[s];
      const Side& prev = cs[(s + 3) % 4];
      std::vector<int> child(cur.first.begin(), cur.first.end());
      child.push_back(centre_id);
      child.push_back(prev.first.back());
      child.insert(child.end(), prev.second.begin(), prev.second.end());
      cells.push_back(std::move(child));
    }
  }
  return PolyMesh(std::move(verts), std::move(cells));
}

} // namespace sobvem
