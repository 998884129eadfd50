#include "rfk/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "rfk/error.hpp"

namespace rfk::geometry {

double segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const Point ap = p - a;
  const double len2 = dot(ab, ab);
  double s = len2 > 0.0 ? dot(ap, ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return norm(ap - s * ab);
}

const char* to_string(Side side) { return side == Side::Inner ? "inner" : "outer"; }

namespace {

double polyline_area(const std::vector<Point>& poly, Point origin) {
  double twice = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(poly[i] - origin, poly[(i + 1) % n] - origin);
  }
  return 0.5 * twice;
}

double polyline_length(const std::vector<Point>& poly) {
  double len = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) len += norm(poly[(i + 1) % n] - poly[i]);
  return len;
}

}  // namespace

StarBoundary::StarBoundary(Point center, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                           std::size_t samples, double phase)
    : center_(center), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)), phase_(phase) {
  if (samples < 3) throw Error(ErrorCode::InvalidDomain, "boundary needs at least 3 vertices");
  if (cos_.empty()) throw Error(ErrorCode::InvalidDomain, "missing a0 coefficient");
  const std::size_t order = std::max(cos_.size() - 1, sin_.size());
  cos_.resize(order + 1, 0.0);
  sin_.resize(order, 0.0);
  for (double c : cos_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidDomain, "non-finite Fourier coefficient");
  }
  for (double c : sin_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidDomain, "non-finite Fourier coefficient");
  }
  if (!std::isfinite(center.x) || !std::isfinite(center.y) || !std::isfinite(phase)) {
    throw Error(ErrorCode::InvalidDomain, "non-finite center");
  }

  // Positivity on a grid much denser than the polyline. With rho > 0 the curve is star-shaped
  // about the center, hence simple.
  const std::size_t dense = std::max<std::size_t>(4096, 8 * samples);
  for (std::size_t i = 0; i < dense; ++i) {
    const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(dense);
    if (!(radius(theta) > 0.0)) {
      throw Error(ErrorCode::InvalidDomain, "radius function is not positive at theta=" + std::to_string(theta));
    }
  }

  polyline_.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    polyline_[i] = point(phase_ + kTwoPi * static_cast<double>(i) / static_cast<double>(samples));
  }
  area_ = polyline_area(polyline_, center_);
  perimeter_ = polyline_length(polyline_);
}

StarBoundary StarBoundary::circle(Point center, double radius, std::size_t samples) {
  return StarBoundary(center, {radius}, {}, samples);
}

double StarBoundary::radius(double theta) const {
  double rho = cos_[0];
  for (std::size_t k = 1; k < cos_.size(); ++k) {
    const double kt = static_cast<double>(k) * theta;
    rho += cos_[k] * std::cos(kt) + sin_[k - 1] * std::sin(kt);
  }
  return rho;
}

double StarBoundary::radius_derivative(double theta) const {
  double d = 0.0;
  for (std::size_t k = 1; k < cos_.size(); ++k) {
    const double kd = static_cast<double>(k);
    const double kt = kd * theta;
    d += kd * (-cos_[k] * std::sin(kt) + sin_[k - 1] * std::cos(kt));
  }
  return d;
}

Point StarBoundary::point(double theta) const {
  const double rho = radius(theta);
  return {center_.x + rho * std::cos(theta), center_.y + rho * std::sin(theta)};
}

double StarBoundary::radial_excess(Point p) const {
  const Point d = p - center_;
  const double dist = norm(d);
  if (dist == 0.0) return -cos_[0];
  return dist - radius(std::atan2(d.y, d.x));
}

bool StarBoundary::contains(Point p) const { return radial_excess(p) < 0.0; }

BoundingBox StarBoundary::bounds() const {
  BoundingBox box{{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()},
                  {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()}};
  const std::size_t dense = 4 * polyline_.size();
  for (std::size_t i = 0; i < dense; ++i) {
    const Point q = point(kTwoPi * static_cast<double>(i) / static_cast<double>(dense));
    box.lo.x = std::min(box.lo.x, q.x);
    box.lo.y = std::min(box.lo.y, q.y);
    box.hi.x = std::max(box.hi.x, q.x);
    box.hi.y = std::max(box.hi.y, q.y);
  }
  return box;
}

StarBoundary StarBoundary::scaled(double factor) const {
  std::vector<double> a(cos_);
  std::vector<double> b(sin_);
  for (double& c : a) c *= factor;
  for (double& c : b) c *= factor;
  return StarBoundary(factor * center_, std::move(a), std::move(b), samples(), phase_);
}

StarBoundary StarBoundary::translated(Point offset) const {
  return StarBoundary(center_ + offset, cos_, sin_, samples(), phase_);
}

StarBoundary StarBoundary::rotated(double angle) const {
  std::vector<double> a(cos_);
  std::vector<double> b(sin_);
  for (std::size_t k = 1; k < a.size(); ++k) {
    const double kphi = static_cast<double>(k) * angle;
    const double c = std::cos(kphi);
    const double s = std::sin(kphi);
    a[k] = cos_[k] * c - sin_[k - 1] * s;
    b[k - 1] = cos_[k] * s + sin_[k - 1] * c;
  }
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Point rc{c * center_.x - s * center_.y, s * center_.x + c * center_.y};
  return StarBoundary(rc, std::move(a), std::move(b), samples(), phase_ + angle);
}

StarBoundary StarBoundary::resampled(std::size_t samples) const {
  return StarBoundary(center_, cos_, sin_, samples, phase_);
}

DomainSpec::DomainSpec(StarBoundary inner, StarBoundary outer, double margin)
    : inner_(std::move(inner)), outer_(std::move(outer)) {
  for (const Point& p : inner_.polyline()) {
    if (outer_.radial_excess(p) > -margin) {
      throw Error(ErrorCode::InvalidDomain, "inner boundary is not strictly inside the outer boundary");
    }
  }
  if (!(outer_.area() - inner_.area() > 0.0)) {
    throw Error(ErrorCode::InvalidDomain, "domain area is not positive");
  }
}

DomainSpec DomainSpec::scaled(double factor) const {
  return DomainSpec(inner_.scaled(factor), outer_.scaled(factor), 0.0);
}

DomainSpec DomainSpec::translated(Point offset) const {
  return DomainSpec(inner_.translated(offset), outer_.translated(offset), 0.0);
}

DomainSpec DomainSpec::rotated(double angle) const {
  return DomainSpec(inner_.rotated(angle), outer_.rotated(angle), 0.0);
}

DomainSpec make_annulus(double r, double R, Point center, std::size_t samples) {
  if (!(R > r && r > 0.0)) throw Error(ErrorCode::InvalidDomain, "annulus needs R > r > 0");
  return DomainSpec(StarBoundary::circle(center, r, samples), StarBoundary::circle(center, R, samples));
}

double area(const DomainSpec& domain) { return domain.outer().area() - domain.inner().area(); }

double perimeter(const StarBoundary& boundary) { return boundary.perimeter(); }

double distance_to_boundary(const DomainSpec& domain, Point p, Side which) {
  const auto& poly = domain.boundary(which).polyline();
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) best = std::min(best, segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

PolylineDistance::PolylineDistance(std::span<const Point> closed_polyline)
    : vertices_(closed_polyline.begin(), closed_polyline.end()) {
  if (vertices_.size() < 2) throw Error(ErrorCode::InvalidDomain, "polyline needs at least 2 vertices");
  nodes_.reserve(2 * vertices_.size() / 4 + 2);
  build(0, static_cast<int>(vertices_.size()));
}

namespace {
constexpr int kLeafSegments = 8;

double box_distance(const BoundingBox& b, Point p) {
  const double dx = std::max({b.lo.x - p.x, 0.0, p.x - b.hi.x});
  const double dy = std::max({b.lo.y - p.y, 0.0, p.y - b.hi.y});
  return std::hypot(dx, dy);
}
}  // namespace

int PolylineDistance::build(int first, int last) {
  const std::size_t n = vertices_.size();
  Node node{};
  node.first = first;
  node.last = last;
  node.box = {{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()},
              {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()}};
  for (int s = first; s <= last; ++s) {
    const Point& p = vertices_[static_cast<std::size_t>(s) % n];
    node.box.lo = {std::min(node.box.lo.x, p.x), std::min(node.box.lo.y, p.y)};
    node.box.hi = {std::max(node.box.hi.x, p.x), std::max(node.box.hi.y, p.y)};
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (last - first > kLeafSegments) {
    const int mid = first + (last - first) / 2;
    const int l = build(first, mid);
    const int r = build(mid, last);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
  }
  return id;
}

double PolylineDistance::operator()(Point p) const {
  const std::size_t n = vertices_.size();
  double best = std::numeric_limits<double>::infinity();
  // Depth-first branch and bound, nearer child first.
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
    if (box_distance(node.box, p) >= best) continue;
    if (node.left < 0) {
      for (int s = node.first; s < node.last; ++s) {
        best = std::min(best, segment_distance(p, vertices_[static_cast<std::size_t>(s)],
                                               vertices_[static_cast<std::size_t>(s + 1) % n]));
      }
      continue;
    }
    const double dl = box_distance(nodes_[static_cast<std::size_t>(node.left)].box, p);
    const double dr = box_distance(nodes_[static_cast<std::size_t>(node.right)].box, p);
    if (dl < dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best;
}

double isoperimetric_deficit(const StarBoundary& boundary) {
  const double p = boundary.perimeter();
  return p * p - 4.0 * kPi * boundary.area();
}

AnnulusMatch match_annulus(const DomainSpec& domain, const RobinPair& robin, double tolerance) {
  if (robin.product_sign() < 0) {
    throw Error(ErrorCode::UnsupportedRegime, "h_in * h_out < 0 is outside the covered regimes");
  }
  const double omega = area(domain);
  const double p_in = domain.inner().perimeter();
  const double p_out = domain.outer().perimeter();
  AnnulusMatch m;
  if (robin.outer.is_neumann()) {
    m.r = p_in / kTwoPi;
    m.R = std::sqrt(m.r * m.r + omega / kPi);
    m.matched = {MatchConstraint::Area, MatchConstraint::InnerPerimeter};
    m.residuals = {(kPi * (m.R * m.R - m.r * m.r) - omega) / omega, (kTwoPi * m.r - p_in) / p_in};
  } else if (robin.inner.is_neumann()) {
    m.R = p_out / kTwoPi;
    const double r2 = m.R * m.R - omega / kPi;
    if (r2 < 0.0) throw Error(ErrorCode::InfeasibleMatch, "R^2 - |Omega|/pi < 0");
    m.r = std::sqrt(r2);
    m.matched = {MatchConstraint::Area, MatchConstraint::OuterPerimeter};
    m.residuals = {(kPi * (m.R * m.R - m.r * m.r) - omega) / omega, (kTwoPi * m.R - p_out) / p_out};
  } else {
    m.r = p_in / kTwoPi;
    m.R = p_out / kTwoPi;
    m.compatibility_residual = (p_out * p_out - p_in * p_in - 4.0 * kPi * omega) / (4.0 * kPi * omega);
    if (!(std::abs(m.compatibility_residual) <= tolerance)) {
      throw Error(ErrorCode::IncompatibleDomain,
                  "perimeters and area violate |dOut|^2 - |dIn|^2 = 4 pi |Omega| (relative residual " +
                      std::to_string(m.compatibility_residual) + ")");
    }
    m.matched = {MatchConstraint::Area, MatchConstraint::InnerPerimeter, MatchConstraint::OuterPerimeter};
    m.residuals = {(kPi * (m.R * m.R - m.r * m.r) - omega) / omega, (kTwoPi * m.r - p_in) / p_in,
                   (kTwoPi * m.R - p_out) / p_out};
  }
  if (!(m.R > m.r)) throw Error(ErrorCode::InfeasibleMatch, "matched annulus has R <= r");
  return m;
}

namespace {

double parse_number(const std::string& token, int line_no) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  if (begin != end && *begin == '+') ++begin;
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": bad number '" + token + "'");
  }
  return v;
}

struct CurveFields {
  bool has_center = false;
  bool has_coeffs = false;
  Point center;
  std::vector<double> a;
  std::vector<double> b;
};

}  // namespace

DomainSpec parse_domain(std::istream& in, std::size_t samples) {
  CurveFields inner;
  CurveFields outer;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<double> values;
    std::string token;
    while (ls >> token) values.push_back(parse_number(token, line_no));

    CurveFields* target = nullptr;
    std::string field;
    if (key.rfind("inner_", 0) == 0) {
      target = &inner;
      field = key.substr(6);
    } else if (key.rfind("outer_", 0) == 0) {
      target = &outer;
      field = key.substr(6);
    } else {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (field == "center") {
      if (values.size() != 2) throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": center needs x y");
      target->center = {values[0], values[1]};
      target->has_center = true;
    } else if (field == "coeffs") {
      if (values.empty()) throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": empty coefficient list");
      target->a = {values[0]};
      target->b.clear();
      for (std::size_t i = 1; i < values.size(); i += 2) {
        target->a.push_back(values[i]);
        target->b.push_back(i + 1 < values.size() ? values[i + 1] : 0.0);
      }
      target->has_coeffs = true;
    } else {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!inner.has_center || !inner.has_coeffs || !outer.has_center || !outer.has_coeffs) {
    throw Error(ErrorCode::Parse, "domain file needs inner_center, inner_coeffs, outer_center, outer_coeffs");
  }
  return DomainSpec(StarBoundary(inner.center, inner.a, inner.b, samples),
                    StarBoundary(outer.center, outer.a, outer.b, samples));
}

DomainSpec load_domain(const std::string& path, std::size_t samples) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open domain file " + path);
  return parse_domain(in, samples);
}

void write_domain(std::ostream& out, const DomainSpec& domain) {
  auto emit = [&out](const char* prefix, const StarBoundary& b) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g %.17g", b.center().x, b.center().y);
    out << prefix << "_center " << buf << '\n' << prefix << "_coeffs";
    const auto a = b.cos_coeffs();
    const auto s = b.sin_coeffs();
    std::snprintf(buf, sizeof buf, " %.17g", a[0]);
    out << buf;
    for (std::size_t k = 1; k < a.size(); ++k) {
      std::snprintf(buf, sizeof buf, " %.17g %.17g", a[k], s[k - 1]);
      out << buf;
    }
    out << '\n';
  };
  emit("inner", domain.inner());
  emit("outer", domain.outer());
}

}  // namespace rfk::geometry
