#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles/fd_radial.hpp"
#include "rfk/error.hpp"
#include "rfk/radial.hpp"

using namespace rfk;
using namespace rfk::radial;

namespace {

RobinParam fin(double h) { return RobinParam::finite(h); }
const RobinParam kD = RobinParam::dirichlet();
const RobinParam kN = RobinParam::neumann();

oracle::FdBoundary fd(RobinParam p) { return {p.is_dirichlet(), p.value()}; }

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("Neumann-Neumann annulus has lambda1 = 0 and constant v") {
  const RadialEigen e = lambda1_radial({1.0, 2.0, kN, kN});
  CHECK(std::abs(e.lambda1) < 1e-8);
  for (double v : e.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("negative Robin on both sides gives a negative eigenvalue") {
  CHECK(lambda1_radial({1.0, 2.0, fin(-1), fin(-1)}).lambda1 < 0.0);
}

TEST_CASE("disk limit matches the finite-difference oracle") {
  const double got = lambda1_radial({0.0, 1.0, kN, kD}).lambda1;
  const double want = oracle::fd_radial_lambda1(0.0, 1.0, {}, {true, 0.0});
  CHECK(rel(got, want) < 1e-6);
  CHECK(got == doctest::Approx(5.7831859).epsilon(1e-6));
}

TEST_CASE("shooting agrees with the finite-difference oracle across regimes") {
  const std::vector<std::pair<RobinParam, RobinParam>> cases{
      {kD, kD},       {fin(1), fin(1)}, {fin(-1), fin(-1)}, {fin(1), kN},  {kN, fin(1)},
      {fin(-1), kN},  {kN, fin(-1)},    {kD, kN},           {kN, kD},      {kD, fin(1)},
      {fin(1), kD},   {fin(2), fin(0.5)}};
  for (const auto& [hin, hout] : cases) {
    CAPTURE(hin.to_string());
    CAPTURE(hout.to_string());
    const double got = lambda1_radial({1.0, 2.0, hin, hout}).lambda1;
    const double want = oracle::fd_radial_lambda1(1.0, 2.0, fd(hin), fd(hout));
    CHECK(rel(got, want) < 1e-6);
  }
}

TEST_CASE("Dirichlet-Dirichlet golden value on A_{1,2}") {
  // Frozen from the in-repo finite-difference oracle. The Liouville form -w'' - w/(4t^2) carries a
  // negative potential, so the value sits just below the strip value pi^2.
  const double got = lambda1_radial({1.0, 2.0, kD, kD}).lambda1;
  CHECK(got == doctest::Approx(9.7533221).epsilon(1e-7));
  CHECK(got < std::numbers::pi * std::numbers::pi);
  CHECK(got > 0.98 * std::numbers::pi * std::numbers::pi);
}

TEST_CASE("boundary residuals and positivity") {
  for (const auto& [hin, hout] : std::vector<std::pair<RobinParam, RobinParam>>{
           {fin(1), fin(2)}, {fin(-1), fin(-0.5)}, {kD, fin(1)}, {fin(1), kD}, {kD, kD}}) {
    const RadialEigen e = lambda1_radial({1.0, 2.0, hin, hout});
    for (std::size_t i = 1; i + 1 < e.v.size(); ++i) CHECK(e.v[i] > 0.0);
    const double vr = e.v.front(), dr = e.vprime.front();
    const double vR = e.v.back(), dR = e.vprime.back();
    if (hin.is_dirichlet()) CHECK(std::abs(vr) < 1e-8);
    else CHECK(std::abs(-dr + hin.value() * vr) < 1e-6);
    if (hout.is_dirichlet()) CHECK(std::abs(vR) < 1e-6);
    else CHECK(std::abs(dR + hout.value() * vR) < 1e-6);
  }
}

TEST_CASE("sign dichotomy on a 7x7 grid") {
  const std::vector<RobinParam> nonneg{kN, fin(0.25), fin(0.5), fin(1), fin(2), fin(5), kD};
  const std::vector<RobinParam> nonpos{kN, fin(-0.25), fin(-0.5), fin(-1), fin(-2), fin(-3), fin(-5)};
  for (const auto& a : nonneg)
    for (const auto& b : nonneg)
      if (!(a.is_neumann() && b.is_neumann())) CHECK(lambda1_radial({1.0, 2.0, a, b}).lambda1 > 0.0);
  for (const auto& a : nonpos)
    for (const auto& b : nonpos)
      if (!(a.is_neumann() && b.is_neumann())) CHECK(lambda1_radial({1.0, 2.0, a, b}).lambda1 < 0.0);
}

TEST_CASE("radial monotonicity of the one-sided problems") {
  auto check_sign = [](const RadialEigen& e, int sign) {
    for (std::size_t i = 1; i + 1 < e.vprime.size(); ++i) CHECK(sign * e.vprime[i] > 0.0);
    CHECK(e.v.front() > 0.0);
    CHECK(e.v.back() > 0.0);
  };
  check_sign(lambda1_radial({1.0, 2.0, fin(1), kN}), +1);
  check_sign(lambda1_radial({1.0, 2.0, fin(-1), kN}), -1);
  check_sign(lambda1_radial({1.0, 2.0, kN, fin(1)}), -1);
  check_sign(lambda1_radial({1.0, 2.0, kN, fin(-1)}), +1);
}

TEST_CASE("sigma splitting") {
  for (const auto& [hin, hout] :
       std::vector<std::pair<RobinParam, RobinParam>>{{fin(1), fin(1)}, {fin(-1), fin(-1)}, {kD, kD}, {kD, fin(1)}}) {
    const RadialEigen e = lambda1_radial({1.0, 2.0, hin, hout});
    REQUIRE(e.sigma.has_value());
    const double s = *e.sigma;
    CHECK(s > 1.0);
    CHECK(s < 2.0);
    const double left = lambda1_radial({1.0, s, hin, kN}).lambda1;
    const double right = lambda1_radial({s, 2.0, kN, hout}).lambda1;
    CHECK(rel(left, e.lambda1) < 1e-6);
    CHECK(rel(right, e.lambda1) < 1e-6);
    const int sign = hin.sign();
    CHECK(sign * e.derivative_at(0.5 * (1.0 + s)) > 0.0);
    CHECK(sign * e.derivative_at(0.5 * (s + 2.0)) < 0.0);
  }
}

TEST_CASE("sigma_of rejects one-sided problems") {
  const RadialProblem p{1.0, 2.0, fin(1), kN};
  const RadialEigen e = lambda1_radial(p);
  CHECK_THROWS_AS(sigma_of(e, p), Error);
}

TEST_CASE("scale covariance") {
  const double c = 2.5;
  const double base = lambda1_radial({1.0, 2.0, fin(1), fin(-0.3)}).lambda1;
  const double scaled = lambda1_radial({c, 2.0 * c, fin(1 / c), fin(-0.3 / c)}).lambda1;
  CHECK(rel(scaled * c * c, base) < 1e-8);
}

TEST_CASE("RK4 order under step doubling") {
  // Richardson ratio (l_M - l_2M) / (l_2M - l_4M) ~ 16 for a fourth-order scheme.
  for (const auto& [hin, hout] :
       std::vector<std::pair<RobinParam, RobinParam>>{{fin(1), fin(1)}, {kD, kD}, {fin(-1), kN}}) {
    SolverOptions o;
    o.rel_tol = 1e-14;
    std::vector<double> l;
    for (std::size_t m : {16u, 32u, 64u}) {
      o.steps = m;
      l.push_back(lambda1_radial({1.0, 2.0, hin, hout}, o).lambda1);
    }
    const double ratio = (l[0] - l[1]) / (l[1] - l[2]);
    CAPTURE(ratio);
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 32.0);
  }
}

TEST_CASE("domain monotonicity scans") {
  for (double h : {0.5, 2.0, -0.5, -2.0}) {
    for (RobinSide side : {RobinSide::Inner, RobinSide::Outer}) {
      const auto scan = monotonicity_scan(1.0, 2.0, side, fin(h), 16);
      CHECK(scan.size() == 16);
      CHECK(strict_direction(scan) == expected_direction(side, fin(h)));
    }
  }
  CHECK(expected_direction(RobinSide::Inner, fin(1)) == -1);
  CHECK(expected_direction(RobinSide::Outer, fin(-1)) == -1);
}

TEST_CASE("minimax crossing") {
  for (const auto& [hin, hout] :
       std::vector<std::pair<RobinParam, RobinParam>>{{fin(1), fin(1)}, {fin(-1), fin(-1)}, {kD, kD}}) {
    const MinimaxResult m = minimax_crossing(1.0, 2.0, hin, hout);
    const RadialEigen full = lambda1_radial({1.0, 2.0, hin, hout});
    const double scale = std::max(1.0, std::abs(full.lambda1));
    CHECK(std::abs(m.lambda_minimax - m.lambda_maximin) < 1e-8 * scale);
    CHECK(rel(m.lambda_minimax, full.lambda1) < 1e-6);
    CHECK(std::abs(m.delta_star - *full.sigma) < 1e-6);
  }
}

TEST_CASE("annulus integrals reproduce the eigenvalue") {
  for (const auto& [hin, hout] :
       std::vector<std::pair<RobinParam, RobinParam>>{{fin(1), fin(1)}, {fin(-1), kN}, {kD, fin(2)}}) {
    const RadialEigen e = lambda1_radial({1.0, 2.0, hin, hout});
    const double q = (annulus_dirichlet_energy(e) + annulus_boundary_term(e)) / annulus_l2_norm_squared(e);
    CHECK(rel(q, e.lambda1) < 1e-6);
  }
}

TEST_CASE("invalid radial problems") {
  CHECK_THROWS_AS(lambda1_radial({2.0, 1.0, kN, kD}), Error);
  CHECK_THROWS_AS(lambda1_radial({-1.0, 1.0, kN, kD}), Error);
}
