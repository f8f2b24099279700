#pragma once

#include <algorithm>
#include <cmath>

#include "texrad/math.hpp"

namespace texrad {

// Center-sample rasterization of a 2D triangle given in pixel units. A pixel (x, y) is covered when
// its center (x + 0.5, y + 0.5) lies strictly inside the triangle, or exactly on a top-left edge, so
// two triangles sharing an edge never both claim a center on it.
//
// `emit(x, y, wa, wb, wc)` receives the barycentric weights of a, b, c at the pixel center.
template <class Emit>
void rasterize_triangle(Vec2 a, Vec2 b, Vec2 c, int width, int height, Emit&& emit) {
  double area2 = cross(b - a, c - a);
  if (area2 == 0.0 || !std::isfinite(area2)) return;

  // Orient counter-clockwise; remember the permutation so weights map back to the caller's vertices.
  Vec2 p[3] = {a, b, c};
  int order[3] = {0, 1, 2};
  if (area2 < 0) {
    std::swap(p[1], p[2]);
    std::swap(order[1], order[2]);
    area2 = -area2;
  }

  auto includes_ties = [](Vec2 from, Vec2 to) {
    const Vec2 d = to - from;
    return d.y < 0 || (d.y == 0 && d.x < 0);
  };
  const bool tie[3] = {includes_ties(p[1], p[2]), includes_ties(p[2], p[0]), includes_ties(p[0], p[1])};

  const double lo_x = std::min({p[0].x, p[1].x, p[2].x});
  const double hi_x = std::max({p[0].x, p[1].x, p[2].x});
  const double lo_y = std::min({p[0].y, p[1].y, p[2].y});
  const double hi_y = std::max({p[0].y, p[1].y, p[2].y});
  const int x0 = std::max(0, static_cast<int>(std::floor(lo_x - 0.5)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(hi_x - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::floor(lo_y - 0.5)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(hi_y - 0.5)));

  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 q{x + 0.5, y + 0.5};
      // e[k] is the edge function of the edge opposite vertex k.
      const double e[3] = {cross(p[2] - p[1], q - p[1]), cross(p[0] - p[2], q - p[2]), cross(p[1] - p[0], q - p[0])};
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k) inside = e[k] > 0 || (e[k] == 0 && tie[k]);
      if (!inside) continue;
      double w[3];
      for (int k = 0; k < 3; ++k) w[order[k]] = e[k] / area2;
      emit(x, y, w[0], w[1], w[2]);
    }
  }
}

}  // namespace texrad
