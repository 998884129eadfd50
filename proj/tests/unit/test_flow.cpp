#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "rfk/error.hpp"
#include "rfk/fem.hpp"
#include "rfk/flow.hpp"
#include "rfk/radial.hpp"

using namespace rfk;
using namespace rfk::flow;
using geometry::DomainSpec;
using geometry::StarBoundary;

namespace {

constexpr double kPi = std::numbers::pi;
RobinParam fin(double h) { return RobinParam::finite(h); }
const RobinParam kD = RobinParam::dirichlet();
const RobinParam kN = RobinParam::neumann();

struct Solved {
  DomainSpec domain;
  fem::Mesh mesh;
  fem::EigenResult eigen;
  RobinPair robin;
};

Solved solve(DomainSpec d, RobinPair robin, int nt = 128, int nr = 32) {
  fem::Mesh mesh = fem::build_mesh(d, nt, nr);
  fem::EigenResult e = fem::solve(mesh, robin);
  return {std::move(d), std::move(mesh), std::move(e), robin};
}

bool monotone(const FlowLine& line, Direction dir, double tol) {
  const double sgn = dir == Direction::Forward ? -1.0 : 1.0;
  for (std::size_t k = 1; k < line.values.size(); ++k) {
    if (sgn * (line.values[k] - line.values[k - 1]) < -tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("flow lines on the Robin-Robin annulus") {
  const radial::RadialEigen e = radial::lambda1_radial({1.0, 2.0, fin(1), fin(1)});
  const double sigma = *e.sigma;
  const RadialField field(e);
  CHECK(boundary_direction(field) == Direction::Forward);

  const FlowLine down_in = trace_flow(field, {0.5 * (1.0 + sigma), 0.0}, Direction::Forward);
  CHECK(down_in.termination == Termination::ReachedInner);
  CHECK(monotone(down_in, Direction::Forward, 1e-9));
  const FlowLine down_out = trace_flow(field, {0.0, 0.5 * (sigma + 2.0)}, Direction::Forward);
  CHECK(down_out.termination == Termination::ReachedOuter);
  // Ascending from either side ends on the critical circle.
  const FlowLine up = trace_flow(field, {0.0, -0.5 * (1.0 + sigma)}, Direction::Backward);
  CHECK(up.termination == Termination::CriticalPoint);
  REQUIRE(up.critical.has_value());
  CHECK(std::abs(geometry::norm(*up.critical) - sigma) < 0.02);

  const FlowLine on = trace_flow(field, {sigma * std::cos(0.3), sigma * std::sin(0.3)}, Direction::Forward);
  CHECK(on.termination == Termination::CriticalPoint);
  CHECK(on.points.size() == 1);

  CHECK_THROWS_AS(trace_flow(field, {0.5, 0.0}, Direction::Forward), Error);
  CHECK_THROWS_AS(trace_flow(field, {2.5, 0.0}, Direction::Forward), Error);
}

TEST_CASE("negative Robin data flows toward increasing u") {
  const radial::RadialEigen e = radial::lambda1_radial({1.0, 2.0, fin(-1), fin(-1)});
  const RadialField field(e);
  CHECK(boundary_direction(field) == Direction::Backward);
  const double sigma = *e.sigma;
  CHECK(trace_flow(field, {0.5 * (1.0 + sigma), 0.0}, Direction::Backward).termination == Termination::ReachedInner);
  CHECK(trace_flow(field, {0.5 * (sigma + 2.0), 0.0}, Direction::Backward).termination == Termination::ReachedOuter);
}

TEST_CASE("pure Neumann data has no flow") {
  const Solved s = solve(geometry::make_annulus(1.0, 2.0), {kN, kN}, 32, 8);
  const MeshField field(s.mesh, s.eigen);
  CHECK_THROWS_AS(boundary_direction(field), Error);
  CHECK_THROWS_AS(decompose(field), Error);
}

TEST_CASE("FEM flow lines on an eccentric Dirichlet annulus") {
  const Solved s = solve(DomainSpec(StarBoundary::circle({0.3, 0.0}, 1.0), StarBoundary::circle({}, 2.0)), {kD, kD});
  const MeshField field(s.mesh, s.eigen);
  const double tol = 1e-6 * (field.u_max() - field.u_min());
  for (double phi = 0.0; phi < 2 * kPi; phi += kPi / 6) {
    const Point dir{std::cos(phi), std::sin(phi)};
    const FlowLine near_in = trace_flow(field, Point{0.3, 0.0} + 1.05 * dir, Direction::Forward);
    CHECK(near_in.termination == Termination::ReachedInner);
    CHECK(monotone(near_in, Direction::Forward, tol));
    const FlowLine near_out = trace_flow(field, 1.95 * dir, Direction::Forward);
    CHECK(near_out.termination == Termination::ReachedOuter);
    CHECK(monotone(near_out, Direction::Forward, tol));
  }
}

TEST_CASE("decomposition of the Robin-Robin annulus") {
  const Solved s = solve(geometry::make_annulus(1.0, 2.0), {fin(1), fin(1)});
  const double sigma = *radial::lambda1_radial({1.0, 2.0, fin(1), fin(1)}).sigma;
  const MeshField field(s.mesh, s.eigen);
  const FlowDecomposition dec = decompose(field);
  CAPTURE(dec.unresolved);
  CAPTURE(dec.tie_broken);
  CHECK(dec.unresolved <= 0.02 * dec.cells_in_domain);
  for (std::size_t k = 0; k < dec.in_star.size(); ++k) CHECK_FALSE((dec.in_star[k] && dec.out_star[k]));

  REQUIRE(dec.cut_chains.size() == 1);
  REQUIRE(dec.cut.size() > 3);
  CHECK(dec.cut.front().x == dec.cut.back().x);
  const double hausdorff = distance_to_circle(dec.cut, {}, sigma);
  MESSAGE("cut to sigma-circle: " << hausdorff / dec.step << " cells");
  CHECK(hausdorff <= 2 * dec.step);

  const BasinAreas a = basin_areas(s.mesh, dec);
  CHECK(std::abs(a.in + a.out - a.total) < 0.02 * a.total);
  CHECK(std::abs(a.in - kPi * (sigma * sigma - 1.0)) < 0.02 * kPi * (sigma * sigma - 1.0));
  const InterfaceRadii radii = interface_radii(s.domain, a);
  CHECK(std::abs(radii.sigma_in - radii.sigma_out) < 0.02 * sigma);

  const double lam = radial::lambda1_radial({1.0, 2.0, fin(1), fin(1)}).lambda1;
  const double q_in = restricted_rayleigh(s.mesh, s.eigen.u, dec, Side::Inner, s.robin);
  const double q_out = restricted_rayleigh(s.mesh, s.eigen.u, dec, Side::Outer, s.robin);
  MESSAGE("restricted quotients " << q_in << " " << q_out << " vs " << lam);
  CHECK(std::abs(q_in - lam) < 0.02 * lam);
  CHECK(std::abs(q_out - lam) < 0.02 * lam);

  const double res = cut_neumann_residual(field, dec.cut);
  MESSAGE("cut Neumann residual " << res);
  CHECK(res < 1e-2);
  // A circle of the wrong radius is a much worse Neumann cut.
  std::vector<Point> fake;
  for (int k = 0; k <= 256; ++k) fake.push_back({1.25 * std::cos(2 * kPi * k / 256), 1.25 * std::sin(2 * kPi * k / 256)});
  CHECK(cut_neumann_residual(field, fake) > 5 * res);

  std::ostringstream csv;
  write_labels_csv(csv, dec);
  CHECK(csv.str().rfind("seed_x,seed_y,label\n", 0) == 0);
}

TEST_CASE("decomposition of an eccentric Dirichlet annulus") {
  const Solved s = solve(DomainSpec(StarBoundary::circle({0.3, 0.0}, 1.0), StarBoundary::circle({}, 2.0)), {kD, kD});
  const MeshField field(s.mesh, s.eigen);
  const FlowDecomposition dec = decompose(field);
  CHECK(dec.unresolved <= 0.02 * dec.cells_in_domain);
  REQUIRE(dec.cut_chains.size() == 1);
  const BasinAreas a = basin_areas(s.mesh, dec);
  CHECK(std::abs(a.in + a.out - a.total) < 0.02 * a.total);
  const double q_in = restricted_rayleigh(s.mesh, s.eigen.u, dec, Side::Inner, s.robin);
  const double q_out = restricted_rayleigh(s.mesh, s.eigen.u, dec, Side::Outer, s.robin);
  MESSAGE("eccentric DD restricted quotients " << q_in << " " << q_out << " vs " << s.eigen.lambda1);
  CHECK(std::abs(q_in - s.eigen.lambda1) < 0.03 * s.eigen.lambda1);
  CHECK(std::abs(q_out - s.eigen.lambda1) < 0.03 * s.eigen.lambda1);
  const double res = cut_neumann_residual(field, dec.cut);
  MESSAGE("eccentric cut residual " << res);
  CHECK(res < 5e-2);
}

TEST_CASE("eccentric cut residual decreases under refinement") {
  const DomainSpec d(StarBoundary::circle({0.3, 0.0}, 1.0), StarBoundary::circle({}, 2.0));
  double previous = 1e300;
  for (const auto& [nt, nr, res] : {std::tuple{96, 24, 128}, std::tuple{192, 48, 384}}) {
    const Solved s = solve(d, {kD, kD}, nt, nr);
    const MeshField field(s.mesh, s.eigen);
    DecomposeOptions o;
    o.resolution = res;
    const double r = cut_neumann_residual(field, decompose(field, o).cut);
    MESSAGE("residual at " << nt << "x" << nr << ", grid " << res << ": " << r);
    CHECK(r < previous);
    previous = r;
  }
}
