#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rfk/geometry.hpp"

namespace rfk::contour {

using geometry::BoundingBox;
using geometry::Point;

/// Node-centred scalar samples on a uniform square-cell grid.
struct Grid {
  Point origin;
  double step = 1.0;
  int nx = 0;  // nodes along x
  int ny = 0;  // nodes along y
  std::vector<double> values;

  Point node(int i, int j) const { return {origin.x + step * i, origin.y + step * j}; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
  int cells_x() const { return nx - 1; }
  int cells_y() const { return ny - 1; }
};

/// Grid covering `box` with `resolution` cells along its longer side plus `pad` cells on every side.
Grid make_grid(const BoundingBox& box, int resolution, int pad = 2);

/// Fills grid.values with f at every node; rows are processed in parallel.
void sample(Grid& grid, const std::function<double(Point)>& f, unsigned workers = 0);

struct Segment {
  Point a;
  Point b;
  /// Grid edge ids the endpoints lie on; shared endpoints of adjacent cells carry the same id.
  std::int64_t edge_a = -1;
  std::int64_t edge_b = -1;
};

/// Marching squares for a single level; saddle cells are split according to the cell-centre mean.
std::vector<Segment> extract(const Grid& grid, double level);

/// Visits every (level index k, segment) with level c_k = first + k * spacing, k in [0, count),
/// touching each cell once and only for the levels inside its value range.
void for_each_level_segment(const Grid& grid, double first, double spacing, int count,
                            const std::function<void(int, const Segment&)>& sink);

/// Chains segments sharing edge ids into polylines. Closed chains repeat their first point at the end.
std::vector<std::vector<Point>> chain(const std::vector<Segment>& segments);

double polyline_length(const std::vector<Point>& poly);

}  // namespace rfk::contour
