#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rfk/robin.hpp"

namespace rfk::geometry {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Default number of polyline vertices per boundary curve.
inline constexpr std::size_t kDefaultSamples = 1024;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point, Point) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

/// Distance from p to the closed segment [a, b].
double segment_distance(Point p, Point a, Point b);

struct BoundingBox {
  Point lo;
  Point hi;
};

enum class Side { Inner, Outer };

const char* to_string(Side side);

/// Closed curve given by a truncated Fourier radius function about a center:
///   rho(theta) = a0 + sum_k (a_k cos k theta + b_k sin k theta).
/// The sampled polyline (counterclockwise, `samples` vertices at equispaced angles)
/// is built once at construction; the object is immutable afterwards.
class StarBoundary {
 public:
  /// `cos_coeffs` = {a0, a1, ..., aK}; `sin_coeffs` = {b1, ..., bK} (may be shorter, zero padded).
  /// Vertices sit at theta = phase + 2 pi i / samples; rotations advance the phase so a rotated
  /// curve is sampled at the rotated points.
  /// Throws Error(InvalidDomain) if rho is not strictly positive or samples < 3.
  StarBoundary(Point center, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
               std::size_t samples = kDefaultSamples, double phase = 0.0);

  static StarBoundary circle(Point center, double radius, std::size_t samples = kDefaultSamples);

  double radius(double theta) const;
  double radius_derivative(double theta) const;
  Point point(double theta) const;

  Point center() const { return center_; }
  double phase() const { return phase_; }
  std::span<const double> cos_coeffs() const { return cos_; }
  std::span<const double> sin_coeffs() const { return sin_; }
  std::size_t samples() const { return polyline_.size(); }
  const std::vector<Point>& polyline() const { return polyline_; }

  /// Shoelace area and arc length of the polyline (cached).
  double area() const { return area_; }
  double perimeter() const { return perimeter_; }

  /// Strict interior test through the radius function.
  bool contains(Point p) const;
  /// |p - c| - rho(theta(p)); negative inside.
  double radial_excess(Point p) const;

  BoundingBox bounds() const;

  StarBoundary scaled(double factor) const;
  StarBoundary translated(Point offset) const;
  /// Rigid rotation about the origin by `angle`.
  StarBoundary rotated(double angle) const;
  StarBoundary resampled(std::size_t samples) const;

 private:
  Point center_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  double phase_ = 0.0;
  std::vector<Point> polyline_;
  double area_ = 0.0;
  double perimeter_ = 0.0;
};

/// Doubly connected domain: region inside `outer` minus the closure of the region inside `inner`.
class DomainSpec {
 public:
  /// Throws Error(InvalidDomain) unless every inner vertex lies inside the outer curve with
  /// clearance >= margin and the resulting area is positive.
  DomainSpec(StarBoundary inner, StarBoundary outer, double margin = 1e-3);

  const StarBoundary& inner() const { return inner_; }
  const StarBoundary& outer() const { return outer_; }
  const StarBoundary& boundary(Side side) const { return side == Side::Inner ? inner_ : outer_; }

  bool contains(Point p) const { return outer_.contains(p) && !inner_.contains(p); }
  BoundingBox bounds() const { return outer_.bounds(); }

  DomainSpec scaled(double factor) const;
  DomainSpec translated(Point offset) const;
  DomainSpec rotated(double angle) const;

 private:
  StarBoundary inner_;
  StarBoundary outer_;
};

/// Concentric annulus A_{r,R} as a DomainSpec.
DomainSpec make_annulus(double r, double R, Point center = {}, std::size_t samples = kDefaultSamples);

double area(const DomainSpec& domain);
double perimeter(const StarBoundary& boundary);

/// Euclidean distance from `p` to the polyline of the selected boundary (exact min over segments).
double distance_to_boundary(const DomainSpec& domain, Point p, Side which);

/// Indexed exact distance to a closed polyline. Returns the same value as the brute-force
/// min over segments; queries cost O(local segments) through a uniform bucket grid.
class PolylineDistance {
 public:
  explicit PolylineDistance(std::span<const Point> closed_polyline);
  double operator()(Point p) const;

 private:
  // Boxes over contiguous index ranges of segments; a closed curve keeps them tight.
  struct Node {
    BoundingBox box;
    int first;
    int last;  // exclusive
    int left = -1;
    int right = -1;
  };
  int build(int first, int last);

  std::vector<Point> vertices_;
  std::vector<Node> nodes_;
};

enum class MatchConstraint { Area, InnerPerimeter, OuterPerimeter };

struct AnnulusMatch {
  double r = 0.0;
  double R = 0.0;
  std::vector<MatchConstraint> matched;
  /// One dimensionless residual per entry of `matched`.
  std::vector<double> residuals;
  /// Relative residual of |dOut|^2 - |dIn|^2 = 4 pi |Omega| (0 unless both parameters are non-Neumann).
  double compatibility_residual = 0.0;
};

/// Default relative tolerance on the Robin-Robin compatibility identity. A polygonal circle pair
/// carries an O(N^-2) residual (about 3e-6 at N = 1024), so the bound sits well above it.
inline constexpr double kCompatibilityTolerance = 1e-4;

/// Annulus A_{r,R} matched to the domain according to the regime of `robin`.
AnnulusMatch match_annulus(const DomainSpec& domain, const RobinPair& robin,
                           double tolerance = kCompatibilityTolerance);

/// P^2 - 4 pi A of the boundary polyline.
double isoperimetric_deficit(const StarBoundary& boundary);

// Domain text format:
//   inner_center x y
//   inner_coeffs a0 a1 b1 a2 b2 ...
//   outer_center x y
//   outer_coeffs a0 a1 b1 ...
// Blank lines and '#' comments are ignored.
DomainSpec parse_domain(std::istream& in, std::size_t samples = kDefaultSamples);
DomainSpec load_domain(const std::string& path, std::size_t samples = kDefaultSamples);
void write_domain(std::ostream& out, const DomainSpec& domain);

}  // namespace rfk::geometry
