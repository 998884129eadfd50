#include "rfk/flow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rfk/contour.hpp"
#include "rfk/error.hpp"
#include "rfk/parallel.hpp"
#include "rfk/svg.hpp"

namespace rfk::flow {

using geometry::kPi;
using geometry::dot;
using geometry::norm;

namespace {

std::vector<Point> cycle_points(const fem::Mesh& mesh, const std::vector<std::array<int, 2>>& edges) {
  std::vector<Point> pts;
  pts.reserve(edges.size());
  for (const auto& e : edges) pts.push_back(mesh.nodes[static_cast<std::size_t>(e[0])]);
  return pts;
}

bool inside_polygon(const std::vector<Point>& poly, Point p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point a = poly[i];
    const Point b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

MeshField::MeshField(const fem::Mesh& mesh, const fem::EigenResult& eigen)
    : mesh_(&mesh), u_(eigen.u), grad_(eigen.recovered_grad), lambda_(eigen.lambda1) {
  if (u_.size() != mesh.nodes.size() || grad_.size() != mesh.nodes.size()) {
    throw Error(ErrorCode::InconsistentInput, "eigen result does not belong to this mesh");
  }
  const auto [lo, hi] = std::minmax_element(u_.begin(), u_.end());
  u_lo_ = *lo;
  u_hi_ = *hi;
  for (const Point& g : grad_) max_grad_ = std::max(max_grad_, norm(g));

  box_ = {{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()},
          {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()}};
  for (const Point& p : mesh.nodes) {
    box_.lo = {std::min(box_.lo.x, p.x), std::min(box_.lo.y, p.y)};
    box_.hi = {std::max(box_.hi.x, p.x), std::max(box_.hi.y, p.y)};
  }
  const std::size_t nt = mesh.triangles.size();
  half_edge_.resize(nt);
  double mean_edge = 0.0;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    double shortest = std::numeric_limits<double>::max();
    for (int k = 0; k < 3; ++k) {
      const double len = norm(mesh.nodes[static_cast<std::size_t>(tri[(k + 1) % 3])] -
                              mesh.nodes[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)])]);
      shortest = std::min(shortest, len);
      mean_edge += len;
    }
    half_edge_[t] = 0.5 * shortest;
  }
  mean_edge /= static_cast<double>(3 * nt);

  cell_ = 2.0 * mean_edge;
  nx_ = std::max(1, static_cast<int>(std::ceil((box_.hi.x - box_.lo.x) / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil((box_.hi.y - box_.lo.y) / cell_)));
  buckets_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
  for (std::size_t t = 0; t < nt; ++t) {
    double x0 = std::numeric_limits<double>::max(), y0 = x0, x1 = std::numeric_limits<double>::lowest(), y1 = x1;
    for (int k : mesh.triangles[t]) {
      const Point& p = mesh.nodes[static_cast<std::size_t>(k)];
      x0 = std::min(x0, p.x), x1 = std::max(x1, p.x), y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
    const int i0 = std::clamp(static_cast<int>((x0 - box_.lo.x) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((x1 - box_.lo.x) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((y0 - box_.lo.y) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((y1 - box_.lo.y) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<std::uint32_t>(t));
  }

  hole_ = cycle_points(mesh, mesh.inner_edges);
  inner_ = std::make_unique<geometry::PolylineDistance>(hole_);
  outer_ = std::make_unique<geometry::PolylineDistance>(cycle_points(mesh, mesh.outer_edges));
}

std::optional<MeshField::Location> MeshField::locate(Point p) const {
  if (p.x < box_.lo.x || p.y < box_.lo.y || p.x > box_.hi.x || p.y > box_.hi.y) return std::nullopt;
  const int i = std::min(static_cast<int>((p.x - box_.lo.x) / cell_), nx_ - 1);
  const int j = std::min(static_cast<int>((p.y - box_.lo.y) / cell_), ny_ - 1);
  std::optional<Location> best;
  double best_min = -1e-10;
  for (std::uint32_t t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& tri = mesh_->triangles[t];
    const Point a = mesh_->nodes[static_cast<std::size_t>(tri[0])];
    const Point b = mesh_->nodes[static_cast<std::size_t>(tri[1])];
    const Point c = mesh_->nodes[static_cast<std::size_t>(tri[2])];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    const double l0 = 1.0 - l1 - l2;
    const double m = std::min({l0, l1, l2});
    if (m >= best_min) {
      best_min = m;
      best = Location{t, {l0, l1, l2}};
      if (m >= 0.0) break;
    }
  }
  return best;
}

std::optional<FieldSample> MeshField::sample(Point p) const {
  const auto loc = locate(p);
  if (!loc) return std::nullopt;
  const auto& tri = mesh_->triangles[loc->triangle];
  FieldSample s;
  for (int k = 0; k < 3; ++k) {
    const auto n = static_cast<std::size_t>(tri[static_cast<std::size_t>(k)]);
    s.u += loc->b[k] * u_[n];
    s.grad = s.grad + loc->b[k] * grad_[n];
  }
  s.step = half_edge_[loc->triangle];
  return s;
}

double MeshField::boundary_distance(Point p, Side side) const {
  return side == Side::Inner ? (*inner_)(p) : (*outer_)(p);
}

bool MeshField::in_hole(Point p) const { return inside_polygon(hole_, p); }

// ---------------------------------------------------------------------------------------------

RadialField::RadialField(radial::RadialEigen eigen, Point center, double step)
    : eigen_(std::move(eigen)), center_(center), step_(step) {
  for (double d : eigen_.vprime) max_grad_ = std::max(max_grad_, std::abs(d));
  const auto [lo, hi] = std::minmax_element(eigen_.v.begin(), eigen_.v.end());
  u_lo_ = *lo;
  u_hi_ = *hi;
}

std::optional<FieldSample> RadialField::sample(Point p) const {
  const double r = eigen_.problem.r;
  const double R = eigen_.problem.R;
  const Point d = p - center_;
  const double rho = norm(d);
  if (rho < r * (1.0 - 1e-12) || rho > R * (1.0 + 1e-12)) return std::nullopt;
  FieldSample s;
  s.u = eigen_.value_at(rho);
  const double dv = eigen_.derivative_at(rho);
  s.grad = rho > 0.0 ? (dv / rho) * d : Point{};
  s.step = step_;
  return s;
}

double RadialField::boundary_distance(Point p, Side side) const {
  const double rho = norm(p - center_);
  return side == Side::Inner ? std::abs(rho - eigen_.problem.r) : std::abs(eigen_.problem.R - rho);
}

bool RadialField::in_hole(Point p) const { return norm(p - center_) < eigen_.problem.r; }

BoundingBox RadialField::bounds() const {
  const double R = eigen_.problem.R;
  return {center_ - Point{R, R}, center_ + Point{R, R}};
}

// ---------------------------------------------------------------------------------------------

const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedInner: return "reached_inner";
    case Termination::ReachedOuter: return "reached_outer";
    case Termination::CriticalPoint: return "critical_point";
    case Termination::Budget: return "budget";
  }
  return "?";
}

Direction boundary_direction(const ScalarField& field) {
  const double lambda = field.eigenvalue();
  const double scale = std::max(1.0, field.max_gradient());
  if (std::abs(lambda) < 1e-9 * scale || field.u_max() - field.u_min() < 1e-9 * std::abs(field.u_max())) {
    throw Error(ErrorCode::InvalidArgument, "pure Neumann data has a constant eigenfunction and no flow");
  }
  return lambda > 0.0 ? Direction::Forward : Direction::Backward;
}

FlowLine trace_flow(const ScalarField& field, Point seed, Direction direction, const FlowOptions& opts) {
  auto current = field.sample(seed);
  if (!current) throw Error(ErrorCode::InvalidSeed, "flow seed lies outside the domain");
  const double sgn = direction == Direction::Forward ? -1.0 : 1.0;
  // Criticality is judged on |grad u| / |u|, so exponentially small but regular tails (thin
  // Dirichlet necks) are not mistaken for critical sets. Where |u| ~ max |u| this is the plain
  // critical_tol * max |grad u| threshold.
  const double u_scale = std::max(std::abs(field.u_min()), std::abs(field.u_max()));
  const double crit_ratio = opts.critical_tol * field.max_gradient() / u_scale;
  auto is_critical = [&](const FieldSample& s) { return norm(s.grad) < crit_ratio * std::abs(s.u); };

  FlowLine line;
  line.seed = seed;
  line.points.push_back(seed);
  line.values.push_back(current->u);

  auto heading = [&](Point p, Point& out) {
    const auto s = field.sample(p);
    if (!s) return false;
    const double g = norm(s->grad);
    if (g == 0.0 || is_critical(*s)) return false;
    out = (sgn / g) * s->grad;
    return true;
  };

  Point z = seed;
  for (int step = 0; step < opts.max_steps; ++step) {
    const double eps_bd = opts.boundary_tol > 0.0 ? opts.boundary_tol : 0.25 * current->step;
    const double din = field.boundary_distance(z, Side::Inner);
    const double dout = field.boundary_distance(z, Side::Outer);
    if (std::min(din, dout) < eps_bd) {
      line.termination = din <= dout ? Termination::ReachedInner : Termination::ReachedOuter;
      return line;
    }
    if (is_critical(*current)) {
      line.termination = Termination::CriticalPoint;
      line.critical = z;
      return line;
    }

    double h = current->step;
    bool advanced = false;
    bool left_domain = false;
    for (int halvings = 0; halvings < 40 && !advanced; ++halvings, h *= 0.5) {
      Point k1, k2, k3, k4;
      if (!heading(z, k1) || !heading(z + (0.5 * h) * k1, k2) || !heading(z + (0.5 * h) * k2, k3) ||
          !heading(z + h * k3, k4)) {
        left_domain = !field.sample(z + h * k1).has_value();
        continue;
      }
      const Point next = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const auto s = field.sample(next);
      if (!s) {
        left_domain = true;
        continue;
      }
      // Strict progress keeps u monotone along the line and stops oscillation about a ridge.
      if (sgn * (s->u - current->u) > 0.0) {
        z = next;
        current = s;
        advanced = true;
      } else if (h < 1e-6 * current->step) {
        break;
      }
    }
    if (!advanced) {
      if (left_domain) {
        line.termination = din <= dout ? Termination::ReachedInner : Termination::ReachedOuter;
      } else {
        // No admissible step in the flow direction: u is stationary here.
        line.termination = Termination::CriticalPoint;
        line.critical = z;
      }
      return line;
    }
    line.points.push_back(z);
    line.values.push_back(current->u);
  }
  line.termination = Termination::Budget;
  return line;
}

// ---------------------------------------------------------------------------------------------

namespace {

std::vector<std::uint8_t> dilate(const std::vector<std::uint8_t>& m, int nx, int ny, int radius) {
  std::vector<std::uint8_t> out(m.size(), 0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      std::uint8_t v = 0;
      for (int dj = -radius; dj <= radius && !v; ++dj)
        for (int di = -radius; di <= radius && !v; ++di) {
          const int a = i + di, b = j + dj;
          if (a >= 0 && b >= 0 && a < nx && b < ny) v = m[static_cast<std::size_t>(b) * nx + a];
        }
      out[static_cast<std::size_t>(j) * nx + i] = v;
    }
  return out;
}

std::vector<std::uint8_t> erode(const std::vector<std::uint8_t>& m, int nx, int ny, int radius) {
  std::vector<std::uint8_t> out(m.size(), 0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      std::uint8_t v = 1;
      for (int dj = -radius; dj <= radius && v; ++dj)
        for (int di = -radius; di <= radius && v; ++di) {
          const int a = std::clamp(i + di, 0, nx - 1), b = std::clamp(j + dj, 0, ny - 1);
          v = m[static_cast<std::size_t>(b) * nx + a];
        }
      out[static_cast<std::size_t>(j) * nx + i] = v;
    }
  return out;
}

std::vector<std::uint8_t> closing(const std::vector<std::uint8_t>& m, int nx, int ny, int radius) {
  if (radius <= 0) return m;
  return erode(dilate(m, nx, ny, radius), nx, ny, radius);
}

void box_blur(std::vector<double>& v, int nx, int ny, int radius) {
  std::vector<double> tmp(v.size());
  const double w = 1.0 / (2 * radius + 1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += v[static_cast<std::size_t>(j) * nx + std::clamp(i + d, 0, nx - 1)];
      tmp[static_cast<std::size_t>(j) * nx + i] = acc * w;
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += tmp[static_cast<std::size_t>(std::clamp(j + d, 0, ny - 1)) * nx + i];
      v[static_cast<std::size_t>(j) * nx + i] = acc * w;
    }
}

}  // namespace

Label FlowDecomposition::basin_at(Point p) const {
  const int i = std::clamp(static_cast<int>(std::floor((p.x - box.lo.x) / step)), 0, nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y - box.lo.y) / step)), 0, ny - 1);
  return extended[static_cast<std::size_t>(j) * nx + i];
}

FlowDecomposition decompose(const ScalarField& field, const DecomposeOptions& opts) {
  if (opts.resolution < 8) throw Error(ErrorCode::InvalidArgument, "decomposition grid needs at least 8 cells");
  FlowDecomposition dec;
  dec.direction = boundary_direction(field);
  const BoundingBox b = field.bounds();
  dec.step = std::max(b.hi.x - b.lo.x, b.hi.y - b.lo.y) / opts.resolution;
  dec.box.lo = b.lo - Point{dec.step, dec.step};
  dec.nx = static_cast<int>(std::ceil((b.hi.x - b.lo.x) / dec.step)) + 2;
  dec.ny = static_cast<int>(std::ceil((b.hi.y - b.lo.y) / dec.step)) + 2;
  dec.box.hi = dec.box.lo + Point{dec.nx * dec.step, dec.ny * dec.step};
  const std::size_t n = static_cast<std::size_t>(dec.nx) * static_cast<std::size_t>(dec.ny);
  dec.labels.assign(n, Label::Outside);

  std::atomic<int> ties{0};
  parallel_for(
      static_cast<std::size_t>(dec.ny),
      [&](std::size_t jj) {
        const int j = static_cast<int>(jj);
        for (int i = 0; i < dec.nx; ++i) {
          const Point c = dec.centre(i, j);
          Label& label = dec.labels[jj * dec.nx + i];
          if (!field.sample(c)) {
            label = field.in_hole(c) ? Label::Hole : Label::Outside;
            continue;
          }
          const FlowLine line = trace_flow(field, c, dec.direction, opts.flow);
          switch (line.termination) {
            case Termination::ReachedInner: label = Label::InBasin; break;
            case Termination::ReachedOuter: label = Label::OutBasin; break;
            case Termination::CriticalPoint:
              label = Label::InBasin;
              ties.fetch_add(1, std::memory_order_relaxed);
              break;
            case Termination::Budget: label = Label::Unresolved; break;
          }
        }
      },
      opts.workers);
  dec.tie_broken = ties.load();

  std::vector<std::uint8_t> in_ext(n), out_ext(n), domain(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Label l = dec.labels[k];
    in_ext[k] = l == Label::InBasin || l == Label::Hole;
    out_ext[k] = l == Label::OutBasin || l == Label::Outside;
    domain[k] = l != Label::Hole && l != Label::Outside;
    dec.cells_in_domain += domain[k];
    dec.unresolved += l == Label::Unresolved;
  }
  if (dec.cells_in_domain == 0) throw Error(ErrorCode::DecompositionFailure, "no grid cell lies in the domain");
  if (dec.unresolved > opts.max_unresolved * dec.cells_in_domain) {
    throw Error(ErrorCode::DecompositionFailure,
                "unresolved flow lines on " + std::to_string(dec.unresolved) + " of " +
                    std::to_string(dec.cells_in_domain) + " cells; retune critical_tol or max_steps");
  }

  const auto in_closed = closing(in_ext, dec.nx, dec.ny, opts.closing_radius);
  const auto out_closed = closing(out_ext, dec.nx, dec.ny, opts.closing_radius);
  dec.in_star.assign(n, 0);
  dec.out_star.assign(n, 0);
  dec.extended.assign(n, Label::Unresolved);
  for (std::size_t k = 0; k < n; ++k) {
    dec.in_star[k] = domain[k] && in_closed[k];
    dec.out_star[k] = domain[k] && out_closed[k] && !dec.in_star[k];
    if (dec.labels[k] == Label::Hole || dec.in_star[k]) dec.extended[k] = Label::InBasin;
    else if (dec.labels[k] == Label::Outside || dec.out_star[k]) dec.extended[k] = Label::OutBasin;
  }

  // Cut: interface of the inner side (basin plus hole) on the cell-centre lattice.
  contour::Grid g;
  g.origin = dec.centre(0, 0);
  g.step = dec.step;
  g.nx = dec.nx;
  g.ny = dec.ny;
  g.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) g.values[k] = dec.extended[k] == Label::InBasin ? 1.0 : 0.0;
  // A 5x5 box blur turns the staircase of the binary mask into a curve with usable normals; the
  // 0.5 level of the blurred indicator stays within a cell of the mask interface.
  box_blur(g.values, dec.nx, dec.ny, 2);
  dec.cut_chains = contour::chain(contour::extract(g, 0.5));
  std::sort(dec.cut_chains.begin(), dec.cut_chains.end(),
            [](const auto& a, const auto& b) { return contour::polyline_length(a) > contour::polyline_length(b); });
  if (!dec.cut_chains.empty()) dec.cut = dec.cut_chains.front();
  return dec;
}

double cut_neumann_residual(const ScalarField& field, const std::vector<Point>& cut) {
  double acc = 0.0;
  double length = 0.0;
  for (std::size_t k = 1; k < cut.size(); ++k) {
    const Point d = cut[k] - cut[k - 1];
    const double len = norm(d);
    if (len == 0.0) continue;
    const auto s = field.sample(0.5 * (cut[k] + cut[k - 1]));
    if (!s) continue;
    const Point normal{-d.y / len, d.x / len};
    const double dn = dot(s->grad, normal);
    acc += len * dn * dn;
    length += len;
  }
  if (length == 0.0 || field.max_gradient() == 0.0) return 0.0;
  return std::sqrt(acc / length) / field.max_gradient();
}

namespace {

// Basin coverage of each triangle from the centroids of its 16 congruent sub-triangles.
std::vector<std::array<double, 2>> coverage(const fem::Mesh& mesh, const FlowDecomposition& dec) {
  constexpr int kSub = 4;
  std::vector<std::array<double, 2>> cov(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point a = mesh.nodes[static_cast<std::size_t>(tri[0])];
    const Point b = mesh.nodes[static_cast<std::size_t>(tri[1])];
    const Point c = mesh.nodes[static_cast<std::size_t>(tri[2])];
    int in = 0, out = 0, total = 0;
    auto at = [&](double s, double r) { return a + (s / kSub) * (b - a) + (r / kSub) * (c - a); };
    for (int i = 0; i < kSub; ++i)
      for (int j = 0; i + j < kSub; ++j) {
        // Upward sub-triangle and, where it exists, the downward one.
        const Point up = (1.0 / 3.0) * (at(i, j) + at(i + 1, j) + at(i, j + 1));
        const Label lu = dec.basin_at(up);
        in += lu == Label::InBasin, out += lu == Label::OutBasin, ++total;
        if (i + j + 1 < kSub) {
          const Point down = (1.0 / 3.0) * (at(i + 1, j) + at(i + 1, j + 1) + at(i, j + 1));
          const Label ld = dec.basin_at(down);
          in += ld == Label::InBasin, out += ld == Label::OutBasin, ++total;
        }
      }
    cov[t] = {static_cast<double>(in) / total, static_cast<double>(out) / total};
  }
  return cov;
}

}  // namespace

BasinAreas basin_areas(const fem::Mesh& mesh, const FlowDecomposition& dec) {
  const auto cov = coverage(mesh, dec);
  BasinAreas a;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double area = mesh.signed_area(t);
    a.in += cov[t][0] * area;
    a.out += cov[t][1] * area;
    a.total += area;
  }
  return a;
}

double restricted_rayleigh(const fem::Mesh& mesh, std::span<const double> u, const FlowDecomposition& dec, Side side,
                           const RobinPair& robin) {
  if (u.size() != mesh.nodes.size()) throw Error(ErrorCode::InconsistentInput, "nodal vector size mismatch");
  const auto cov = coverage(mesh, dec);
  const auto grads = fem::triangle_gradients(mesh, u);
  const int which = side == Side::Inner ? 0 : 1;
  double num = 0.0, den = 0.0, weight = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double w = cov[t][static_cast<std::size_t>(which)];
    if (w == 0.0) continue;
    const auto& tri = mesh.triangles[t];
    const double area = mesh.signed_area(t);
    const double a = u[static_cast<std::size_t>(tri[0])], b = u[static_cast<std::size_t>(tri[1])],
                 c = u[static_cast<std::size_t>(tri[2])];
    const double sum = a + b + c;
    num += w * area * dot(grads[t], grads[t]);
    den += w * area / 12.0 * (a * a + b * b + c * c + sum * sum);
    weight += w;
  }
  if (weight == 0.0 || den == 0.0) throw Error(ErrorCode::EmptyBasin, "basin covers no triangle");
  const RobinParam h = side == Side::Inner ? robin.inner : robin.outer;
  if (h.is_finite() && !h.is_neumann()) {
    const auto& edges = side == Side::Inner ? mesh.inner_edges : mesh.outer_edges;
    double bd = 0.0;
    for (const auto& e : edges) {
      const double ua = u[static_cast<std::size_t>(e[0])], ub = u[static_cast<std::size_t>(e[1])];
      const double len = norm(mesh.nodes[static_cast<std::size_t>(e[1])] - mesh.nodes[static_cast<std::size_t>(e[0])]);
      bd += len / 3.0 * (ua * ua + ua * ub + ub * ub);
    }
    num += h.value() * bd;
  }
  return num / den;
}

InterfaceRadii interface_radii(const geometry::DomainSpec& domain, const BasinAreas& areas) {
  const double r = domain.inner().perimeter() / geometry::kTwoPi;
  const double R = domain.outer().perimeter() / geometry::kTwoPi;
  return {std::sqrt(r * r + areas.in / kPi), std::sqrt(std::max(0.0, R * R - areas.out / kPi))};
}

double distance_to_circle(const std::vector<Point>& poly, Point centre, double radius) {
  double worst = 0.0;
  for (const Point& p : poly) worst = std::max(worst, std::abs(norm(p - centre) - radius));
  return worst;
}

void write_labels_csv(std::ostream& out, const FlowDecomposition& dec) {
  out << "seed_x,seed_y,label\n";
  char buf[96];
  for (int j = 0; j < dec.ny; ++j)
    for (int i = 0; i < dec.nx; ++i) {
      const Label l = dec.labels[static_cast<std::size_t>(j) * dec.nx + i];
      const char* name = l == Label::InBasin ? "in" : l == Label::OutBasin ? "out" : l == Label::Unresolved ? "unresolved" : nullptr;
      if (!name) continue;
      const Point c = dec.centre(i, j);
      std::snprintf(buf, sizeof buf, "%.8g,%.8g,%s\n", c.x, c.y, name);
      out << buf;
    }
}

void plot_flow(const std::string& path, const geometry::DomainSpec& domain, const FlowDecomposition& dec) {
  svg::Canvas canvas(dec.box);
  for (int j = 0; j < dec.ny; ++j)
    for (int i = 0; i < dec.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * dec.nx + i;
      const Point lo{dec.box.lo.x + i * dec.step, dec.box.lo.y + j * dec.step};
      if (dec.in_star[k]) canvas.rect(lo, dec.step, "#9ecae1");
      else if (dec.out_star[k]) canvas.rect(lo, dec.step, "#fdd0a2");
      else if (dec.labels[k] == Label::Unresolved) canvas.rect(lo, dec.step, "#bdbdbd");
    }
  canvas.polyline(domain.outer().polyline(), "black", 1.5, true);
  canvas.polyline(domain.inner().polyline(), "black", 1.5, true);
  for (const auto& chain : dec.cut_chains) canvas.polyline(chain, "#d62728", 1.5);
  canvas.save(path);
}

}  // namespace rfk::flow
