#include "rfk/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "rfk/error.hpp"

namespace rfk::radial {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Rescale threshold for the linear shooting system (growth for very negative lambda).
constexpr double kRescale = 1e100;

struct State {
  double v;
  double w;  // t v'
};

inline State rhs(double t, const State& y, double lambda) { return {y.w / t, -lambda * t * y.v}; }

inline State rk4_step(double t, const State& y, double h, double lambda) {
  const State k1 = rhs(t, y, lambda);
  const State k2 = rhs(t + 0.5 * h, {y.v + 0.5 * h * k1.v, y.w + 0.5 * h * k1.w}, lambda);
  const State k3 = rhs(t + 0.5 * h, {y.v + 0.5 * h * k2.v, y.w + 0.5 * h * k2.w}, lambda);
  const State k4 = rhs(t + h, {y.v + h * k3.v, y.w + h * k3.w}, lambda);
  return {y.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
          y.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

struct Launch {
  double t0;
  State y0;
  bool dirichlet_start;
};

Launch launch(const RadialProblem& p, const SolverOptions& opts) {
  if (p.r == 0.0) return {opts.axis_epsilon, {1.0, 0.0}, false};
  if (p.h_in.is_dirichlet()) return {p.r, {0.0, p.r}, true};
  return {p.r, {1.0, p.r * p.h_in.value()}, false};
}

struct Shot {
  double residual = 0.0;  // outer boundary residual F(lambda)
  int zeros = 0;          // sign changes of v in the open interval
  bool finite = true;
};

/// Integrates the shooting solution; optionally records the trajectory (unscaled per node).
Shot shoot(const RadialProblem& p, double lambda, std::size_t steps, const SolverOptions& opts,
           std::vector<double>* ts = nullptr, std::vector<State>* ys = nullptr) {
  const Launch L = launch(p, opts);
  const double h = (p.R - L.t0) / static_cast<double>(steps);
  State y = L.y0;
  Shot shot;
  int last_sign = L.dirichlet_start ? 0 : 1;
  double scale = 1.0;
  if (ts) {
    ts->assign(1, L.t0);
    ys->assign(1, y);
  }
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = L.t0 + static_cast<double>(i) * h;
    y = rk4_step(t, y, h, lambda);
    if (!std::isfinite(y.v) || !std::isfinite(y.w)) {
      shot.finite = false;
      return shot;
    }
    if (std::abs(y.v) > kRescale || std::abs(y.w) > kRescale) {
      y.v /= kRescale;
      y.w /= kRescale;
      scale *= kRescale;
      if (ys) {
        for (State& s : *ys) {
          s.v /= kRescale;
          s.w /= kRescale;
        }
      }
    }
    if (ts) {
      ts->push_back(i + 1 == steps ? p.R : L.t0 + static_cast<double>(i + 1) * h);
      ys->push_back(y);
    }
    if (i + 1 < steps) {
      const int s = (y.v > 0.0) - (y.v < 0.0);
      if (s != 0) {
        if (last_sign != 0 && s != last_sign) ++shot.zeros;
        last_sign = s;
      }
    }
  }
  shot.residual = p.h_out.is_dirichlet() ? y.v : y.w / p.R + p.h_out.value() * y.v;
  return shot;
}

/// True iff lambda >= lambda1 (oscillation criterion, monotone in lambda).
struct Probe {
  const RadialProblem& problem;
  const SolverOptions& opts;
  std::size_t steps;

  bool operator()(double lambda) {
    Shot s = shoot(problem, lambda, steps, opts);
    if (!s.finite) {
      // one step halving before giving up
      s = shoot(problem, lambda, 2 * steps, opts);
      if (!s.finite) throw Error(ErrorCode::Overflow, "non-finite shooting solution at lambda=" + std::to_string(lambda));
    }
    return s.residual <= 0.0 || s.zeros >= 1;
  }
};

void validate(const RadialProblem& p) {
  if (!(p.r >= 0.0) || !(p.R > p.r) || !std::isfinite(p.R)) {
    throw Error(ErrorCode::InvalidArgument, "radial problem needs 0 <= r < R");
  }
}

}  // namespace

RadialEigen lambda1_radial(const RadialProblem& problem, const SolverOptions& opts) {
  validate(problem);
  if (opts.steps < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 RK steps");
  Probe above{problem, opts, opts.steps};

  const double hmax = std::max(problem.r > 0.0 ? problem.h_in.finite_magnitude() : 0.0, problem.h_out.finite_magnitude());
  const double width = problem.R - problem.r;
  double lo = -4.0 * (hmax + 1.0) * (hmax + 1.0);
  double hi = 16.0 * (std::numbers::pi / width) * (std::numbers::pi / width);

  int expansions = 0;
  while (above(lo)) {
    if (++expansions > opts.max_expansions) throw Error(ErrorCode::NoEigenvalueFound, "lower window edge not below lambda1");
    lo *= 4.0;
  }
  expansions = 0;
  while (!above(hi)) {
    if (++expansions > opts.max_expansions) throw Error(ErrorCode::NoEigenvalueFound, "upper window edge not above lambda1");
    hi *= 4.0;
  }

  // Coarse scan for the first transition, then bisection.
  double a = lo;
  double b = hi;
  const std::size_t n = std::max<std::size_t>(opts.scan_points, 2);
  for (std::size_t k = 1; k < n; ++k) {
    const double lam = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
    if (above(lam)) {
      b = lam;
      break;
    }
    a = lam;
  }
  while (b - a > opts.rel_tol * std::max({1.0, std::abs(a), std::abs(b)})) {
    const double mid = 0.5 * (a + b);
    (above(mid) ? b : a) = mid;
  }

  RadialEigen out;
  out.lambda1 = 0.5 * (a + b);
  out.problem = problem;
  out.steps = opts.steps;
  std::vector<State> ys;
  Shot s = shoot(problem, out.lambda1, opts.steps, opts, &out.grid, &ys);
  if (!s.finite) throw Error(ErrorCode::Overflow, "non-finite eigenfunction");
  out.v.resize(ys.size());
  out.vprime.resize(ys.size());
  double vmax = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    out.v[i] = ys[i].v;
    out.vprime[i] = ys[i].w / out.grid[i];
    vmax = std::max(vmax, std::abs(ys[i].v));
  }
  if (!(vmax > 0.0)) throw Error(ErrorCode::NoEigenvalueFound, "trivial shooting solution");
  for (std::size_t i = 0; i < ys.size(); ++i) {
    out.v[i] /= vmax;
    out.vprime[i] /= vmax;
  }
  if (problem.r > 0.0 && problem.h_in.sign() * problem.h_out.sign() > 0) {
    out.sigma = sigma_of(out, problem);
  }
  return out;
}

namespace {

std::size_t locate(const RadialEigen& e, double t) {
  const std::size_t m = e.grid.size() - 1;
  const double h = (e.grid.back() - e.grid.front()) / static_cast<double>(m);
  const double x = (t - e.grid.front()) / h;
  if (x <= 0.0) return 0;
  return std::min(m - 1, static_cast<std::size_t>(x));
}

}  // namespace

double RadialEigen::value_at(double t) const {
  t = std::clamp(t, grid.front(), grid.back());
  const std::size_t i = locate(*this, t);
  const double h = grid[i + 1] - grid[i];
  const double s = (t - grid[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * v[i] + h10 * h * vprime[i] + h01 * v[i + 1] + h11 * h * vprime[i + 1];
}

double RadialEigen::derivative_at(double t) const {
  t = std::clamp(t, grid.front(), grid.back());
  const std::size_t i = locate(*this, t);
  const double h = grid[i + 1] - grid[i];
  const double s = (t - grid[i]) / h;
  const double d00 = 6 * s * s - 6 * s;
  const double d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -6 * s * s + 6 * s;
  const double d11 = 3 * s * s - 2 * s;
  return (d00 * v[i] + d01 * v[i + 1]) / h + d10 * vprime[i] + d11 * vprime[i + 1];
}

double sigma_of(const RadialEigen& eigen, const RadialProblem& problem) {
  if (!(problem.r > 0.0) || problem.h_in.sign() * problem.h_out.sign() <= 0) {
    throw Error(ErrorCode::UnsupportedRegime, "sigma needs h_in * h_out > 0 on an annulus");
  }
  const auto& vp = eigen.vprime;
  std::size_t changes = 0;
  std::size_t at = 0;
  int last = 0;
  for (std::size_t i = 0; i < vp.size(); ++i) {
    const int s = (vp[i] > 0.0) - (vp[i] < 0.0);
    if (s == 0) continue;
    if (last != 0 && s != last) {
      ++changes;
      at = i - 1;
    }
    last = s;
  }
  if (changes != 1) {
    throw Error(ErrorCode::StructureViolation, "v' changes sign " + std::to_string(changes) + " times (expected 1)");
  }
  // Walk back over exact zeros so that [t_at, t_at+1] brackets the sign change.
  while (at > 0 && vp[at] == 0.0) --at;
  // Local bisection with one RK4 sub-step from the left node.
  const double lambda = eigen.lambda1;
  const State y0{eigen.v[at], eigen.grid[at] * vp[at]};
  const double t0 = eigen.grid[at];
  double a = t0;
  double b = eigen.grid[at + 1];
  const int sign_a = (vp[at] > 0.0) - (vp[at] < 0.0);
  for (int it = 0; it < 80 && b - a > 1e-15 * b; ++it) {
    const double mid = 0.5 * (a + b);
    const State y = rk4_step(t0, y0, mid - t0, lambda);
    const int s = (y.w > 0.0) - (y.w < 0.0);
    (s == sign_a ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

std::vector<ScanPoint> monotonicity_scan(double r, double R, RobinSide side, RobinParam h, std::size_t n_samples,
                                         const SolverOptions& opts) {
  if (!(R > r && r > 0.0)) throw Error(ErrorCode::InvalidArgument, "scan needs R > r > 0");
  if (h.is_neumann()) throw Error(ErrorCode::InvalidArgument, "scan needs a non-Neumann Robin side");
  std::vector<ScanPoint> out;
  out.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double delta = r + (R - r) * static_cast<double>(i + 1) / static_cast<double>(n_samples + 1);
    const RadialProblem p = side == RobinSide::Inner ? RadialProblem{r, delta, h, RobinParam::neumann()}
                                                     : RadialProblem{delta, R, RobinParam::neumann(), h};
    out.push_back({delta, lambda1_radial(p, opts).lambda1});
  }
  return out;
}

int strict_direction(const std::vector<ScanPoint>& scan) {
  bool inc = true;
  bool dec = true;
  for (std::size_t i = 1; i < scan.size(); ++i) {
    inc = inc && scan[i].lambda1 > scan[i - 1].lambda1;
    dec = dec && scan[i].lambda1 < scan[i - 1].lambda1;
  }
  if (scan.size() < 2) return 0;
  return inc ? 1 : (dec ? -1 : 0);
}

int expected_direction(RobinSide side, RobinParam h) {
  const int s = h.sign();
  return side == RobinSide::Inner ? -s : s;
}

MinimaxResult minimax_crossing(double r, double R, RobinParam h_in, RobinParam h_out, const SolverOptions& opts) {
  if (!(R > r && r > 0.0)) throw Error(ErrorCode::InvalidArgument, "minimax needs R > r > 0");
  if (h_in.sign() * h_out.sign() <= 0) throw Error(ErrorCode::UnsupportedRegime, "minimax needs h_in * h_out > 0");
  auto rn = [&](double d) { return lambda1_radial({r, d, h_in, RobinParam::neumann()}, opts).lambda1; };
  auto nr = [&](double d) { return lambda1_radial({d, R, RobinParam::neumann(), h_out}, opts).lambda1; };
  auto gap = [&](double d) { return rn(d) - nr(d); };

  double a = r + 1e-3 * (R - r);
  double b = R - 1e-3 * (R - r);
  const double ga = gap(a);
  const double gb = gap(b);
  if (!(ga * gb < 0.0)) throw Error(ErrorCode::StructureViolation, "RN and NR eigenvalue curves do not cross");
  const int sa = ga > 0.0 ? 1 : -1;
  while (b - a > 1e-13 * R) {
    const double mid = 0.5 * (a + b);
    const double g = gap(mid);
    if (g == 0.0) {
      a = b = mid;
      break;
    }
    ((g > 0.0 ? 1 : -1) == sa ? a : b) = mid;
  }
  MinimaxResult out;
  out.delta_star = 0.5 * (a + b);
  const double l_rn = rn(out.delta_star);
  const double l_nr = nr(out.delta_star);
  out.lambda_minimax = std::max(l_rn, l_nr);
  out.lambda_maximin = std::min(l_rn, l_nr);
  return out;
}

namespace {

template <class F>
double simpson(const RadialEigen& e, F f) {
  const std::size_t m = e.grid.size() - 1;
  const double h = (e.grid.back() - e.grid.front()) / static_cast<double>(m);
  double sum = f(0) + f(m);
  for (std::size_t i = 1; i < m; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i);
  if (m % 2 == 0) return sum * h / 3.0;
  // odd step count: trapezoid fallback
  double trap = 0.5 * (f(0) + f(m));
  for (std::size_t i = 1; i < m; ++i) trap += f(i);
  return trap * h;
}

}  // namespace

double annulus_dirichlet_energy(const RadialEigen& e) {
  return simpson(e, [&](std::size_t i) { return kTwoPi * e.grid[i] * e.vprime[i] * e.vprime[i]; });
}

double annulus_l2_norm_squared(const RadialEigen& e) {
  return simpson(e, [&](std::size_t i) { return kTwoPi * e.grid[i] * e.v[i] * e.v[i]; });
}

double annulus_boundary_term(const RadialEigen& e) {
  const auto& p = e.problem;
  double term = 0.0;
  if (p.r > 0.0 && p.h_in.is_finite()) term += p.h_in.value() * kTwoPi * p.r * e.v.front() * e.v.front();
  if (p.h_out.is_finite()) term += p.h_out.value() * kTwoPi * p.R * e.v.back() * e.v.back();
  return term;
}

}  // namespace rfk::radial
