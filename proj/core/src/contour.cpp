#include "rfk/contour.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "rfk/error.hpp"
#include "rfk/parallel.hpp"

namespace rfk::contour {

Grid make_grid(const BoundingBox& box, int resolution, int pad) {
  if (resolution < 2) throw Error(ErrorCode::InvalidArgument, "grid resolution must be at least 2");
  const double w = box.hi.x - box.lo.x;
  const double h = box.hi.y - box.lo.y;
  Grid g;
  g.step = std::max(w, h) / resolution;
  g.origin = {box.lo.x - pad * g.step, box.lo.y - pad * g.step};
  g.nx = static_cast<int>(std::ceil(w / g.step)) + 2 * pad + 1;
  g.ny = static_cast<int>(std::ceil(h / g.step)) + 2 * pad + 1;
  g.values.assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);
  return g;
}

void sample(Grid& grid, const std::function<double(Point)>& f, unsigned workers) {
  parallel_for(
      static_cast<std::size_t>(grid.ny),
      [&](std::size_t j) {
        for (int i = 0; i < grid.nx; ++i) {
          grid.values[j * grid.nx + i] = f(grid.node(i, static_cast<int>(j)));
        }
      },
      workers);
}

namespace {

struct CellCorners {
  int i;
  int j;
  double v[4];  // (i,j), (i+1,j), (i+1,j+1), (i,j+1)
};

std::int64_t horizontal_edge(const Grid& g, int i, int j) { return 2 * (static_cast<std::int64_t>(j) * g.nx + i); }
std::int64_t vertical_edge(const Grid& g, int i, int j) { return 2 * (static_cast<std::int64_t>(j) * g.nx + i) + 1; }

// Crossing on edge e of the cell. Interpolation always runs from the lower-index node so that
// neighbouring cells reproduce the identical point.
Point crossing(const Grid& g, const CellCorners& c, int e, double level, std::int64_t& id) {
  int pi, pj, qi, qj;
  double fp, fq;
  switch (e) {
    case 0: pi = c.i, pj = c.j, qi = c.i + 1, qj = c.j, fp = c.v[0], fq = c.v[1]; id = horizontal_edge(g, c.i, c.j); break;
    case 1: pi = c.i + 1, pj = c.j, qi = c.i + 1, qj = c.j + 1, fp = c.v[1], fq = c.v[2]; id = vertical_edge(g, c.i + 1, c.j); break;
    case 2: pi = c.i, pj = c.j + 1, qi = c.i + 1, qj = c.j + 1, fp = c.v[3], fq = c.v[2]; id = horizontal_edge(g, c.i, c.j + 1); break;
    default: pi = c.i, pj = c.j, qi = c.i, qj = c.j + 1, fp = c.v[0], fq = c.v[3]; id = vertical_edge(g, c.i, c.j); break;
  }
  const double t = (level - fp) / (fq - fp);
  const Point p = g.node(pi, pj);
  const Point q = g.node(qi, qj);
  return p + t * (q - p);
}

template <class Sink>
void march_cell(const Grid& g, const CellCorners& c, double level, Sink&& sink) {
  bool above[4];
  for (int k = 0; k < 4; ++k) above[k] = c.v[k] >= level;
  // Edge k joins corners k and k+1 (mod 4).
  int crossing_edges[4];
  int n = 0;
  for (int e = 0; e < 4; ++e) {
    if (above[e] != above[(e + 1) % 4]) crossing_edges[n++] = e;
  }
  auto emit = [&](int e1, int e2) {
    Segment s;
    s.a = crossing(g, c, e1, level, s.edge_a);
    s.b = crossing(g, c, e2, level, s.edge_b);
    sink(s);
  };
  if (n == 2) {
    emit(crossing_edges[0], crossing_edges[1]);
  } else if (n == 4) {
    const double centre = 0.25 * (c.v[0] + c.v[1] + c.v[2] + c.v[3]);
    if ((centre >= level) == above[0]) {
      // Corners 1 and 3 are isolated.
      emit(0, 1);
      emit(2, 3);
    } else {
      emit(3, 0);
      emit(1, 2);
    }
  }
}

bool load_cell(const Grid& g, int i, int j, CellCorners& c) {
  c.i = i;
  c.j = j;
  c.v[0] = g.at(i, j);
  c.v[1] = g.at(i + 1, j);
  c.v[2] = g.at(i + 1, j + 1);
  c.v[3] = g.at(i, j + 1);
  return std::isfinite(c.v[0]) && std::isfinite(c.v[1]) && std::isfinite(c.v[2]) && std::isfinite(c.v[3]);
}

}  // namespace

std::vector<Segment> extract(const Grid& grid, double level) {
  std::vector<Segment> out;
  CellCorners c{};
  for (int j = 0; j + 1 < grid.ny; ++j) {
    for (int i = 0; i + 1 < grid.nx; ++i) {
      if (!load_cell(grid, i, j, c)) continue;
      march_cell(grid, c, level, [&](const Segment& s) { out.push_back(s); });
    }
  }
  return out;
}

void for_each_level_segment(const Grid& grid, double first, double spacing, int count,
                            const std::function<void(int, const Segment&)>& sink) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "level spacing must be positive");
  CellCorners c{};
  for (int j = 0; j + 1 < grid.ny; ++j) {
    for (int i = 0; i + 1 < grid.nx; ++i) {
      if (!load_cell(grid, i, j, c)) continue;
      const double lo = std::min({c.v[0], c.v[1], c.v[2], c.v[3]});
      const double hi = std::max({c.v[0], c.v[1], c.v[2], c.v[3]});
      const int k_lo = std::max(0, static_cast<int>(std::floor((lo - first) / spacing)));
      const int k_hi = std::min(count - 1, static_cast<int>(std::floor((hi - first) / spacing)) + 1);
      for (int k = k_lo; k <= k_hi; ++k) {
        const double level = first + k * spacing;
        if (!(lo < level && level <= hi)) continue;
        march_cell(grid, c, level, [&](const Segment& s) { sink(k, s); });
      }
    }
  }
}

std::vector<std::vector<Point>> chain(const std::vector<Segment>& segments) {
  std::unordered_map<std::int64_t, std::vector<std::size_t>> by_edge;
  by_edge.reserve(2 * segments.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_edge[segments[s].edge_a].push_back(s);
    by_edge[segments[s].edge_b].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  auto other = [&](std::size_t s, std::int64_t edge) -> long {
    for (std::size_t t : by_edge[edge]) {
      if (t != s && !used[t]) return static_cast<long>(t);
    }
    return -1;
  };
  std::vector<std::vector<Point>> out;
  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    used[start] = true;
    std::vector<Point> forward{segments[start].a, segments[start].b};
    // Grow from the b end, then from the a end.
    std::int64_t tip = segments[start].edge_b;
    std::size_t cur = start;
    for (long nxt = other(cur, tip); nxt >= 0; nxt = other(cur, tip)) {
      const Segment& s = segments[static_cast<std::size_t>(nxt)];
      used[static_cast<std::size_t>(nxt)] = true;
      const bool a_side = s.edge_a == tip;
      forward.push_back(a_side ? s.b : s.a);
      tip = a_side ? s.edge_b : s.edge_a;
      cur = static_cast<std::size_t>(nxt);
    }
    const bool closed = tip == segments[start].edge_a && forward.size() > 2;
    if (!closed) {
      std::vector<Point> backward;
      tip = segments[start].edge_a;
      cur = start;
      for (long nxt = other(cur, tip); nxt >= 0; nxt = other(cur, tip)) {
        const Segment& s = segments[static_cast<std::size_t>(nxt)];
        used[static_cast<std::size_t>(nxt)] = true;
        const bool a_side = s.edge_a == tip;
        backward.push_back(a_side ? s.b : s.a);
        tip = a_side ? s.edge_b : s.edge_a;
        cur = static_cast<std::size_t>(nxt);
      }
      std::reverse(backward.begin(), backward.end());
      backward.insert(backward.end(), forward.begin(), forward.end());
      forward = std::move(backward);
    }
    out.push_back(std::move(forward));
  }
  return out;
}

double polyline_length(const std::vector<Point>& poly) {
  double len = 0.0;
  for (std::size_t i = 1; i < poly.size(); ++i) len += geometry::norm(poly[i] - poly[i - 1]);
  return len;
}

}  // namespace rfk::contour
