#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rfk/error.hpp"
#include "rfk/geometry.hpp"

using namespace rfk;
using namespace rfk::geometry;

namespace {

// Dense polar quadrature of (rho_out^2 - rho_in^2)/2 for concentric star curves.
double polar_area(const StarBoundary& b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    const double rho = b.radius(th);
    acc += 0.5 * rho * rho;
  }
  return acc * kTwoPi / static_cast<double>(n);
}

double polar_length(const StarBoundary& b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    acc += std::hypot(b.radius(th), b.radius_derivative(th));
  }
  return acc * kTwoPi / static_cast<double>(n);
}

void check_error(auto&& fn, ErrorCode code) {
  try {
    fn();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("area of concentric and shifted annuli") {
  const DomainSpec a = make_annulus(1.0, 2.0);
  CHECK(area(a) == doctest::Approx(3.0 * kPi).epsilon(1e-4));
  const DomainSpec shifted(StarBoundary::circle({0.3, 0.0}, 1.0), StarBoundary::circle({}, 2.0));
  CHECK(area(shifted) == doctest::Approx(area(a)).epsilon(1e-12));
}

TEST_CASE("area of a perturbed outer curve against polar quadrature") {
  const StarBoundary outer({}, {2.0, 0.0, 0.0, 0.1}, {}, 4096);
  const StarBoundary inner = StarBoundary::circle({}, 1.0, 4096);
  const DomainSpec d(inner, outer);
  const double oracle = polar_area(outer, 1000000) - polar_area(inner, 1000000);
  CHECK(area(d) == doctest::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("perimeter examples") {
  CHECK(perimeter(StarBoundary::circle({}, 2.0)) == doctest::Approx(4.0 * kPi).epsilon(1e-5));
  const StarBoundary b({}, {1.0, 0.0, 0.2}, {}, 8192);
  CHECK(perimeter(b) == doctest::Approx(polar_length(b, 1000000)).epsilon(1e-6));
  const StarBoundary k8({0.1, -0.2}, {1.0, 0.05, 0.1, 0.0, 0.02, 0.0, 0.01, 0.0, 0.005},
                        {0.0, 0.03, 0.0, 0.01, 0.0, 0.0, 0.0, 0.002});
  CHECK(k8.scaled(2.0).perimeter() == doctest::Approx(2.0 * k8.perimeter()).epsilon(1e-12));
}

TEST_CASE("distance to boundary") {
  const DomainSpec a = make_annulus(1.0, 2.0);
  CHECK(distance_to_boundary(a, {1.5, 0.0}, Side::Inner) == doctest::Approx(0.5).epsilon(1e-5));
  const Point on = a.outer().polyline()[17];
  CHECK(distance_to_boundary(a, on, Side::Outer) == doctest::Approx(0.0));

  // Random points against dense sampling of the smooth curve.
  const StarBoundary outer({}, {2.0, 0.1, 0.0, 0.15}, {0.0, 0.05});
  const DomainSpec d(StarBoundary::circle({0.2, 0.1}, 0.8), outer);
  std::vector<Point> dense(1000000);
  for (std::size_t i = 0; i < dense.size(); ++i) dense[i] = outer.point(kTwoPi * double(i) / double(dense.size()));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.2, 2.2);
  const PolylineDistance indexed(outer.polyline());
  for (int k = 0; k < 20; ++k) {
    const Point p{u(rng), u(rng)};
    double best = 1e300;
    for (const Point& q : dense) best = std::min(best, norm(p - q));
    const double got = distance_to_boundary(d, p, Side::Outer);
    CHECK(std::abs(got - best) < 1e-4);
    CHECK(indexed(p) == doctest::Approx(got).epsilon(1e-12));
  }
}

TEST_CASE("match_annulus regimes") {
  const DomainSpec a = make_annulus(1.0, 2.0);
  for (const RobinPair p : {RobinPair{RobinParam::finite(1), RobinParam::neumann()},
                            RobinPair{RobinParam::neumann(), RobinParam::finite(-1)},
                            RobinPair{RobinParam::finite(1), RobinParam::finite(1)},
                            RobinPair{RobinParam::dirichlet(), RobinParam::dirichlet()}}) {
    const AnnulusMatch m = match_annulus(a, p);
    CHECK(m.r == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(m.R == doctest::Approx(2.0).epsilon(1e-5));
  }
  check_error([&] { match_annulus(a, {RobinParam::finite(1), RobinParam::finite(-1)}); },
              ErrorCode::UnsupportedRegime);

  // Shifted hole, h_out = 0: r from the inner perimeter, R from the area.
  const DomainSpec shifted(StarBoundary::circle({0.3, 0.0}, 1.0), StarBoundary::circle({}, 2.0));
  const AnnulusMatch m = match_annulus(shifted, {RobinParam::finite(1), RobinParam::neumann()});
  CHECK(m.r == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(m.R == doctest::Approx(2.0).epsilon(1e-5));

  // Circles have zero deficit, so the shifted pair still satisfies the Robin-Robin identity; a wavy
  // outer curve does not.
  CHECK(match_annulus(shifted, {RobinParam::finite(1), RobinParam::finite(1)}).compatibility_residual < 1e-5);
  const DomainSpec bumpy(StarBoundary::circle({}, 1.0), StarBoundary({}, {2.0, 0, 0, 0, 0.1}, {}));
  check_error([&] { match_annulus(bumpy, {RobinParam::finite(1), RobinParam::finite(1)}); },
              ErrorCode::IncompatibleDomain);
  // Neumann-Robin: the isoperimetric inequality keeps r^2 = R^2 - |Omega|/pi above the hole's share.
  const DomainSpec wavy(StarBoundary::circle({}, 0.5), StarBoundary({}, {2.0, 0, 0, 0, 0, 0, 0, 0.3}, {}));
  const AnnulusMatch mw = match_annulus(wavy, {RobinParam::neumann(), RobinParam::finite(1)});
  CHECK(mw.r > 0.5);
}

TEST_CASE("Robin-Robin match satisfies the area identity when compatible") {
  const DomainSpec a = make_annulus(1.0, 2.0);
  const AnnulusMatch m = match_annulus(a, {RobinParam::finite(2), RobinParam::finite(3)});
  CHECK(m.compatibility_residual < 1e-5);
  const double implied = kPi * (m.R * m.R - m.r * m.r);
  const double oracle = (std::pow(a.outer().perimeter(), 2) - std::pow(a.inner().perimeter(), 2)) / (4.0 * kPi);
  CHECK(implied == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("isoperimetric deficit is nonnegative") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> c(-0.08, 0.08);
  for (int k = 0; k < 25; ++k) {
    std::vector<double> a{1.0};
    std::vector<double> b;
    for (int j = 1; j <= 6; ++j) {
      a.push_back(c(rng));
      b.push_back(c(rng));
    }
    const StarBoundary s({c(rng), c(rng)}, a, b);
    CHECK(isoperimetric_deficit(s) >= -1e-6 * std::pow(s.perimeter(), 2));
  }
    // A regular N-gon carries a deficit of about 4 pi^4 / (3 N^2).
  CHECK(std::abs(isoperimetric_deficit(StarBoundary::circle({}, 1.0))) < 2e-4);
}

TEST_CASE("scaling and rigid motions") {
  const DomainSpec d(StarBoundary({0.1, 0.0}, {0.8, 0.0, 0.1}, {}), StarBoundary({}, {2.0, 0, 0, 0.1}, {0.0, 0.05}));
  const DomainSpec s = d.scaled(1.7);
  CHECK(area(s) == doctest::Approx(1.7 * 1.7 * area(d)).epsilon(1e-12));
  CHECK(s.outer().perimeter() == doctest::Approx(1.7 * d.outer().perimeter()).epsilon(1e-12));
  const DomainSpec r = d.rotated(0.7).translated({3.0, -1.0});
  CHECK(area(r) == doctest::Approx(area(d)).epsilon(1e-10));
  CHECK(r.inner().perimeter() == doctest::Approx(d.inner().perimeter()).epsilon(1e-10));
}

TEST_CASE("invalid domains are rejected") {
  check_error([] { StarBoundary({}, {0.5, 1.0}, {}); }, ErrorCode::InvalidDomain);
  check_error([] { StarBoundary({}, {1.0}, {}, 2); }, ErrorCode::InvalidDomain);
  check_error([] { DomainSpec(StarBoundary::circle({}, 2.0), StarBoundary::circle({}, 1.0)); },
              ErrorCode::InvalidDomain);
  check_error([] { DomainSpec(StarBoundary::circle({1.05, 0}, 1.0), StarBoundary::circle({}, 2.0)); },
              ErrorCode::InvalidDomain);
}

TEST_CASE("domain file round trip and parse errors") {
  const DomainSpec d(StarBoundary({0.2, -0.1}, {0.9, 0.0, 0.1}, {0.05}), StarBoundary({}, {2.0, 0, 0, 0.1}, {}));
  std::stringstream ss;
  write_domain(ss, d);
  const DomainSpec back = parse_domain(ss);
  CHECK(area(back) == doctest::Approx(area(d)).epsilon(1e-12));
  CHECK(back.inner().center() == d.inner().center());

  std::istringstream bad("inner_center 0 0\ninner_coeffs 1 nan\nouter_center 0 0\nouter_coeffs 2\n");
  check_error([&] { parse_domain(bad); }, ErrorCode::Parse);
  std::istringstream missing("# only a comment\ninner_center 0 0\ninner_coeffs 1\n");
  check_error([&] { parse_domain(missing); }, ErrorCode::Parse);
}

TEST_CASE("RobinParam text form") {
  CHECK(RobinParam::parse("inf").is_dirichlet());
  CHECK(RobinParam::parse("-1.5").value() == -1.5);
  CHECK(RobinParam::dirichlet().to_string() == "inf");
  CHECK(RobinParam::finite(0.25).to_string() == "0.25");
  check_error([] { RobinParam::parse("abc"); }, ErrorCode::Parse);
  check_error([] { RobinParam::parse("nan"); }, ErrorCode::Parse);
}
