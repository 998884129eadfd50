#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfk/fem.hpp"
#include "rfk/geometry.hpp"
#include "rfk/radial.hpp"
#include "rfk/robin.hpp"

namespace rfk::flow {

using geometry::BoundingBox;
using geometry::Point;
using geometry::Side;

struct FieldSample {
  double u = 0.0;
  Point grad;
  /// Upper bound for one integration step near the sample point.
  double step = 0.0;
};

/// A first eigenfunction together with the doubly connected region it lives on.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  /// nullopt outside the closed region.
  virtual std::optional<FieldSample> sample(Point p) const = 0;
  virtual double boundary_distance(Point p, Side side) const = 0;
  /// True for points enclosed by the inner boundary.
  virtual bool in_hole(Point p) const = 0;
  virtual BoundingBox bounds() const = 0;
  virtual double max_gradient() const = 0;
  virtual double eigenvalue() const = 0;
  virtual double u_min() const = 0;
  virtual double u_max() const = 0;
};

/// FEM eigenfunction with the node-recovered gradient, both linear inside each triangle.
class MeshField final : public ScalarField {
 public:
  MeshField(const fem::Mesh& mesh, const fem::EigenResult& eigen);

  std::optional<FieldSample> sample(Point p) const override;
  double boundary_distance(Point p, Side side) const override;
  bool in_hole(Point p) const override;
  BoundingBox bounds() const override { return box_; }
  double max_gradient() const override { return max_grad_; }
  double eigenvalue() const override { return lambda_; }
  double u_min() const override { return u_lo_; }
  double u_max() const override { return u_hi_; }

  struct Location {
    std::size_t triangle;
    double b[3];
  };
  std::optional<Location> locate(Point p) const;

  const fem::Mesh& mesh() const { return *mesh_; }
  const std::vector<double>& u() const { return u_; }

 private:
  const fem::Mesh* mesh_;
  std::vector<double> u_;
  std::vector<Point> grad_;
  std::vector<double> half_edge_;
  double lambda_ = 0.0;
  double max_grad_ = 0.0;
  double u_lo_ = 0.0;
  double u_hi_ = 0.0;
  BoundingBox box_{};
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<std::uint32_t>> buckets_;
  std::vector<Point> hole_;
  std::unique_ptr<geometry::PolylineDistance> inner_;
  std::unique_ptr<geometry::PolylineDistance> outer_;
};

/// Exact radial eigenfunction on a concentric annulus.
class RadialField final : public ScalarField {
 public:
  RadialField(radial::RadialEigen eigen, Point center = {}, double step = 0.01);

  std::optional<FieldSample> sample(Point p) const override;
  double boundary_distance(Point p, Side side) const override;
  bool in_hole(Point p) const override;
  BoundingBox bounds() const override;
  double max_gradient() const override { return max_grad_; }
  double eigenvalue() const override { return eigen_.lambda1; }
  double u_min() const override { return u_lo_; }
  double u_max() const override { return u_hi_; }

 private:
  radial::RadialEigen eigen_;
  Point center_;
  double step_;
  double max_grad_ = 0.0;
  double u_lo_ = 0.0;
  double u_hi_ = 0.0;
};

/// Forward follows z' = -grad u (u decreasing), Backward follows z' = +grad u.
enum class Direction { Forward, Backward };

enum class Termination { ReachedInner, ReachedOuter, CriticalPoint, Budget };

const char* to_string(Termination t);

struct FlowOptions {
  /// Critical when |grad u| / |u| < critical_tol * max |grad u| / max |u|.
  double critical_tol = 1e-3;
  /// Boundary reached within this distance; 0 means a quarter of the local step bound.
  double boundary_tol = 0.0;
  int max_steps = 20000;
};

struct FlowLine {
  Point seed;
  std::vector<Point> points;
  /// u at each point of the polyline.
  std::vector<double> values;
  Termination termination = Termination::Budget;
  /// Set for CriticalPoint.
  std::optional<Point> critical;
};

/// RK4 on the unit direction field -+grad u / |grad u|, i.e. the flow lines of z' = -+grad u in
/// arc-length parametrization. Throws Error(InvalidSeed) if the seed lies outside the region.
FlowLine trace_flow(const ScalarField& field, Point seed, Direction direction, const FlowOptions& opts = {});

/// Direction whose flow lines reach the boundary: Forward for lambda1 > 0, Backward for lambda1 < 0.
/// Throws Error(InvalidArgument) for lambda1 = 0 (pure Neumann, constant u).
Direction boundary_direction(const ScalarField& field);

enum class Label : std::uint8_t { Outside, Hole, InBasin, OutBasin, Unresolved };

struct DecomposeOptions {
  int resolution = 256;
  FlowOptions flow;
  int closing_radius = 1;
  /// Error(DecompositionFailure) above this unresolved fraction.
  double max_unresolved = 0.10;
  unsigned workers = 0;
};

struct FlowDecomposition {
  geometry::BoundingBox box;
  double step = 0.0;
  int nx = 0;
  int ny = 0;
  /// Raw labels per cell centre (row-major, y up).
  std::vector<Label> labels;
  /// Regularized basins after closing; disjoint.
  std::vector<std::uint8_t> in_star;
  std::vector<std::uint8_t> out_star;
  int cells_in_domain = 0;
  int unresolved = 0;
  /// Cells whose flow line stopped at a critical point and were assigned to the inner basin.
  int tie_broken = 0;
  /// Closed polyline(s) separating the basins; the longest is `cut`.
  std::vector<std::vector<Point>> cut_chains;
  std::vector<Point> cut;
  Direction direction = Direction::Forward;

  Point centre(int i, int j) const { return {box.lo.x + (i + 0.5) * step, box.lo.y + (j + 0.5) * step}; }
  /// Basin label at an arbitrary point, extended past the region by the nearest labelled cell.
  Label basin_at(Point p) const;
  /// Regularized labels with hole cells folded into the inner basin and exterior cells into the
  /// outer one; read by basin_at.
  std::vector<Label> extended;
};

FlowDecomposition decompose(const ScalarField& field, const DecomposeOptions& opts = {});

/// L2 average over the cut of the normal derivative of u, divided by max |grad u|.
double cut_neumann_residual(const ScalarField& field, const std::vector<Point>& cut);

struct BasinAreas {
  double in = 0.0;
  double out = 0.0;
  double total = 0.0;  // mesh area
};

/// Basin areas from triangle coverage fractions.
BasinAreas basin_areas(const fem::Mesh& mesh, const FlowDecomposition& dec);

/// Rayleigh quotient of u restricted to G_in* (side Inner) or G_out* (side Outer), weighting each
/// triangle by its basin coverage and adding only the boundary term of that side. Throws
/// Error(EmptyBasin) if the basin covers no triangle.
double restricted_rayleigh(const fem::Mesh& mesh, std::span<const double> u, const FlowDecomposition& dec, Side side,
                           const RobinPair& robin);

struct InterfaceRadii {
  /// sqrt(r^2 + |G_in*| / pi) with r = |dOmega_in| / 2 pi.
  double sigma_in = 0.0;
  /// sqrt(R^2 - |G_out*| / pi) with R = |dOmega_out| / 2 pi.
  double sigma_out = 0.0;
};

InterfaceRadii interface_radii(const geometry::DomainSpec& domain, const BasinAreas& areas);

/// Hausdorff distance from the polyline vertices to the circle |x - c| = radius.
double distance_to_circle(const std::vector<Point>& poly, Point centre, double radius);

void write_labels_csv(std::ostream& out, const FlowDecomposition& dec);
void plot_flow(const std::string& path, const geometry::DomainSpec& domain, const FlowDecomposition& dec);

}  // namespace rfk::flow
