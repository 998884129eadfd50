#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rfk/error.hpp"
#include "rfk/fem.hpp"
#include "rfk/parallels.hpp"
#include "rfk/radial.hpp"

using namespace rfk;
using namespace rfk::parallels;
using geometry::StarBoundary;

namespace {

constexpr double kPi = std::numbers::pi;
RobinParam fin(double h) { return RobinParam::finite(h); }
const RobinParam kD = RobinParam::dirichlet();
const RobinParam kN = RobinParam::neumann();

DomainSpec eccentric(double offset) {
  return DomainSpec(StarBoundary::circle({offset, 0.0}, 1.0), StarBoundary::circle({}, 2.0));
}

DomainSpec wavy_outer() {
  return DomainSpec(StarBoundary::circle({}, 1.0), StarBoundary({0.1, 0.0}, {2.0, 0.0, 0.0, 0.12}, {0.0, 0.05}));
}

ProfileOptions opts(int resolution) {
  ProfileOptions o;
  o.resolution = resolution;
  return o;
}

}  // namespace

TEST_CASE("annulus parallels are circles") {
  const DomainSpec a = geometry::make_annulus(1.0, 2.0);
  const ParallelProfile in = level_lengths(a, Side::Inner, opts(512));
  CHECK(in.r == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(in.R == doctest::Approx(2.0).epsilon(1e-4));
  for (std::size_t k = 1; k < in.delta.size(); ++k) {
    if (in.delta[k] > 0.98) break;
    CAPTURE(in.delta[k]);
    CHECK(std::abs(in.s[k] - 2 * kPi * (1 + in.delta[k])) < 5e-3 * 2 * kPi * (1 + in.delta[k]));
  }
  const ParallelProfile out = level_lengths(a, Side::Outer, opts(512));
  for (std::size_t k = 1; k < out.delta.size(); ++k) {
    if (out.delta[k] > 0.98) break;
    CHECK(std::abs(out.s[k] - 2 * kPi * (2 - out.delta[k])) < 5e-3 * 2 * kPi * (2 - out.delta[k]));
  }
  CHECK(in.delta_star == doctest::Approx(1.0).epsilon(0.01));
  CHECK(out.delta_star == doctest::Approx(1.0).epsilon(0.01));
  // Hersch parameter follows T(delta) = ln(1 + delta) / (2 pi).
  CHECK(std::abs(in.param_at(0.5) - std::log(1.5) / (2 * kPi)) < 1e-3 * std::log(1.5) / (2 * kPi));
  CHECK(std::abs(out.param_at(0.5) - (2 * kPi * 2 * 0.5 - kPi * 0.25)) < 1e-3 * 1.75 * kPi);
}

TEST_CASE("g^2 and h integrals reproduce the area") {
  for (const DomainSpec& d : {geometry::make_annulus(1.0, 2.0), eccentric(0.3), wavy_outer()}) {
    for (Side side : {Side::Inner, Side::Outer}) {
      const ParallelProfile p = level_lengths(d, side, opts(512));
      const ParametrizationReport rep = check_parametrization(p);
      CAPTURE(geometry::to_string(side));
      CHECK(rep.area_error < 0.01);
      CHECK(rep.width_ok);
      CHECK(rep.terminal_ok);
      CHECK(rep.worst_g_excess < 5e-3);
    }
  }
}

TEST_CASE("Steiner formula for a convex hole") {
  // rho = 0.6 + 0.08 cos 2 theta stays convex.
  const DomainSpec d(StarBoundary({0.2, -0.1}, {0.6, 0.0, 0.08}, {}), StarBoundary::circle({}, 2.5));
  const ParallelProfile p = level_lengths(d, Side::Inner, opts(768));
  for (std::size_t k = 1; k < p.delta.size(); ++k) {
    // Stay clear of the outer circle: distance from the hole to it is at least 2.5 - 0.2 - 0.1 - 0.68.
    if (p.delta[k] > 1.4) break;
    const double steiner = p.boundary_length + 2 * kPi * p.delta[k];
    CHECK(std::abs(p.s[k] - steiner) < 5e-3 * steiner);
  }
}

TEST_CASE("Nagy bound on eccentric and perturbed domains") {
  for (const DomainSpec& d : {eccentric(0.3), eccentric(0.6), wavy_outer()}) {
    for (Side side : {Side::Inner, Side::Outer}) {
      const NagyReport rep = nagy_check(level_lengths(d, side, opts(512)));
      CAPTURE(rep.worst_excess);
      CHECK(rep.violations == 0);
    }
  }
}

TEST_CASE("degenerate and inconsistent inputs") {
  const DomainSpec a = geometry::make_annulus(1.0, 2.0);
  const fem::Mesh mesh = fem::build_mesh(a, 64, 16);
  const ParallelProfile in = level_lengths(a, Side::Inner, opts(256));
  const radial::RadialEigen wrong = radial::lambda1_radial({1.0, 2.5, fin(1), kN});
  CHECK_THROWS_AS(build_test_function_RN(a, fin(1), wrong, in, mesh), Error);
  const radial::RadialEigen right = radial::lambda1_radial({in.r, in.R, fin(1), kN});
  CHECK_THROWS_AS(build_test_function_NR(a, fin(1), right, in, mesh), Error);
  CHECK_THROWS_AS(level_lengths(a, Side::Inner, opts(1)), Error);
}

TEST_CASE("test function on the matched annulus is the radial eigenfunction") {
  const DomainSpec a = geometry::make_annulus(1.0, 2.0);
  // Fine enough that the Dirichlet case stays inside the 1e-3 equality band.
  const fem::Mesh mesh = fem::build_mesh(a, 192, 48);
  const ParallelProfile in = level_lengths(a, Side::Inner, opts(1024));
  const ParallelProfile out = level_lengths(a, Side::Outer, opts(1024));
  for (RobinParam h : {fin(1), fin(-1), kD}) {
    CAPTURE(h.to_string());
    const radial::RadialEigen ein = radial::lambda1_radial({in.r, in.R, h, kN});
    const TestFunction vin = build_test_function_RN(a, h, ein, in, mesh);
    const radial::RadialEigen eout = radial::lambda1_radial({out.r, out.R, kN, h});
    const TestFunction vout = build_test_function_NR(a, h, eout, out, mesh);
    double err_in = 0.0, err_out = 0.0;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
      const double rho = geometry::norm(mesh.nodes[i]);
      err_in = std::max(err_in, std::abs(vin.values[i] - ein.value_at(rho)));
      err_out = std::max(err_out, std::abs(vout.values[i] - eout.value_at(rho)));
    }
    CHECK(err_in < 1e-3);
    CHECK(err_out < 1e-3);
    const SandwichReport s = sandwich_check(mesh, {h, kN}, vin, fem::solve(mesh, {h, kN}).lambda1);
    CHECK(s.holds());
    const double scale = std::max(1.0, std::abs(s.lambda_annulus));
    CHECK(std::abs(s.quotient - s.lambda_annulus) < 1e-3 * scale);
    CHECK(std::abs(s.lambda_domain - s.lambda_annulus) < 1e-3 * scale);
  }
}

TEST_CASE("Robin-Neumann sandwich on an eccentric annulus") {
  const DomainSpec d = eccentric(0.3);
  const fem::Mesh mesh = fem::build_mesh(d, 128, 32);
  const ParallelProfile p = level_lengths(d, Side::Inner, opts(1024));
  for (RobinParam h : {fin(1), fin(-1), kD}) {
    CAPTURE(h.to_string());
    const radial::RadialEigen e = radial::lambda1_radial({p.r, p.R, h, kN});
    const TestFunction v = build_test_function_RN(d, h, e, p, mesh);
    const SandwichReport s = sandwich_check(d, {h, kN}, v, mesh);
    CAPTURE(s.lambda_domain);
    CAPTURE(s.quotient);
    CAPTURE(s.lambda_annulus);
    CHECK(s.holds());
    CHECK(s.lambda_domain < s.lambda_annulus);

    // Level values: the Robin boundary carries phi(0), the far side the cap.
    double on_inner = 0.0;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
      if (mesh.node_kinds[i] == fem::NodeKind::InnerBoundary) on_inner = v.values[i];
    }
    if (h.sign() > 0) CHECK(on_inner == doctest::Approx(v.v_min).epsilon(1e-9));
    else CHECK(on_inner == doctest::Approx(v.v_max).epsilon(1e-9));

    // Co-area consistency and the L2 direction.
    CHECK(std::abs(s.test_parts.gradient - s.annulus_energy) < 0.02 * s.annulus_energy + 1e-9);
    if (h.is_finite()) {
      if (h.sign() > 0) CHECK(s.test_parts.l2 >= s.annulus_l2 * (1 - 1e-3));
      else CHECK(s.test_parts.l2 <= s.annulus_l2 * (1 + 1e-3));
      // Boundary identity with |dOmega_in| = 2 pi r.
      CHECK(std::abs(h.value() * s.test_parts.inner - s.annulus_boundary) < 0.01 * std::abs(s.annulus_boundary));
    }
  }
}

TEST_CASE("Neumann-Robin sandwich on a perturbed outer boundary") {
  const DomainSpec d = wavy_outer();
  const fem::Mesh mesh = fem::build_mesh(d, 128, 32);
  const ParallelProfile p = level_lengths(d, Side::Outer, opts(1024));
  for (RobinParam h : {fin(1), fin(-1), kD}) {
    CAPTURE(h.to_string());
    const radial::RadialEigen e = radial::lambda1_radial({p.r, p.R, kN, h});
    const TestFunction v = build_test_function_NR(d, h, e, p, mesh);
    const SandwichReport s = sandwich_check(d, {kN, h}, v, mesh);
    CAPTURE(s.lambda_domain);
    CAPTURE(s.quotient);
    CAPTURE(s.lambda_annulus);
    CHECK(s.holds());
    if (h.sign() < 0) CHECK(s.lambda_annulus < 0.0);
    double trace_min = 1e300, trace_max = -1e300;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
      if (mesh.node_kinds[i] != fem::NodeKind::OuterBoundary) continue;
      trace_min = std::min(trace_min, v.values[i]);
      trace_max = std::max(trace_max, v.values[i]);
    }
    CHECK(trace_max - trace_min < 1e-12);
    // Outer parametrization: energy int phi'(l)^2 s^2 dl sits below the annulus energy.
    CHECK(s.test_parts.gradient <= s.annulus_energy * 1.02);
    if (h.is_finite()) {
      CHECK(trace_min == doctest::Approx(h.sign() > 0 ? v.v_min : v.v_max).epsilon(1e-9));
      CHECK(std::abs(h.value() * s.test_parts.outer - s.annulus_boundary) < 0.01 * std::abs(s.annulus_boundary));
    }
  }
}

TEST_CASE("profile csv layout") {
  const ParallelProfile p = level_lengths(geometry::make_annulus(1.0, 2.0), Side::Outer, opts(128));
  std::ostringstream out;
  write_profile_csv(out, p);
  const std::string s = out.str();
  CHECK(s.rfind("delta,s,S,l,L\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == p.delta.size() + 1);
}

TEST_CASE("1024 grid profile runtime") {
  const auto t0 = std::chrono::steady_clock::now();
  (void)level_lengths(eccentric(0.3), Side::Inner, opts(1024));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("1024^2 inner profile: " << secs << " s");
  CHECK(secs < 30.0);
}
