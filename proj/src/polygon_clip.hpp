#pragma once

#include "sobvem/mesh.hpp"

#include <vector>

namespace sobvem::detail {

/// Sutherland-Hodgman clip of a convex or simple polygon against the
/// half-plane {x : normal . x <= offset}.
inline std::vector<Point> clip_half_plane(const std::vector<Point>& poly, const Point& normal,
                                          double offset) {
  std::vector<Point> out;
  const std::size_t n = poly.size();
  if (n == 0) {
    return out;
  }
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    const double dp = normal.dot(p) - offset;
    const double dq = normal.dot(q) - offset;
    if (dp <= 0.0) {
      out.push_back(p);
    }
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      const double s = dp / (dp - dq);
      out.push_back(p + s * (q - p));
    }
  }
  return out;
}

} // namespace sobvem::detail
