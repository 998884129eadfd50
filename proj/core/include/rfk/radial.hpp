#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rfk/robin.hpp"

namespace rfk::radial {

/// Radial Sturm-Liouville problem on [r, R]:
///   -(t v')' = lambda t v,   -v'(r) + h_in v(r) = 0,   v'(R) + h_out v(R) = 0.
/// r = 0 is the disk limit, where h_in is ignored and v'(0) = 0.
struct RadialProblem {
  double r = 1.0;
  double R = 2.0;
  RobinParam h_in;
  RobinParam h_out;
};

struct SolverOptions {
  /// Fixed RK4 step count across [r, R].
  std::size_t steps = 4096;
  /// Bisection stops when the bracket is below rel_tol * max(1, |lambda|).
  double rel_tol = 1e-10;
  /// Scan points across the initial window.
  std::size_t scan_points = 64;
  /// Window expansions by a factor 4 before giving up.
  int max_expansions = 8;
  /// Axis offset for the disk limit.
  double axis_epsilon = 1e-8;
};

struct RadialEigen {
  double lambda1 = 0.0;
  /// RK nodes t_0 = r (or axis_epsilon) ... t_M = R.
  std::vector<double> grid;
  /// v normalized to max v = 1.
  std::vector<double> v;
  std::vector<double> vprime;
  std::optional<double> sigma;
  RadialProblem problem;
  std::size_t steps = 0;

  /// Cubic Hermite interpolation of v, clamped to [r, R].
  double value_at(double t) const;
  double derivative_at(double t) const;
};

/// Smallest eigenvalue with a nodeless shooting solution. Throws Error(NoEigenvalueFound) when no
/// bracket is found inside the expansion budget and Error(Overflow) on non-finite integration.
RadialEigen lambda1_radial(const RadialProblem& problem, const SolverOptions& opts = {});

/// Unique interior zero of v' (requires h_in * h_out > 0). Throws Error(StructureViolation) when
/// v' does not change sign exactly once.
double sigma_of(const RadialEigen& eigen, const RadialProblem& problem);

enum class RobinSide { Inner, Outer };

struct ScanPoint {
  double delta = 0.0;
  double lambda1 = 0.0;
};

/// Inner side: lambda1 of A_{r,delta} with (h, Neumann). Outer side: lambda1 of A_{delta,R} with
/// (Neumann, h). delta runs over n_samples equispaced interior points of (r, R).
std::vector<ScanPoint> monotonicity_scan(double r, double R, RobinSide side, RobinParam h, std::size_t n_samples,
                                         const SolverOptions& opts = {});

/// +1 if the scan is strictly increasing, -1 if strictly decreasing, 0 otherwise.
int strict_direction(const std::vector<ScanPoint>& scan);

/// Direction stated by the domain-monotonicity lemma for the scan above.
int expected_direction(RobinSide side, RobinParam h);

struct MinimaxResult {
  double delta_star = 0.0;
  double lambda_minimax = 0.0;
  double lambda_maximin = 0.0;
};

/// Crossing of delta -> lambda1^{RN}(A_{r,delta}) and delta -> lambda1^{NR}(A_{delta,R}).
MinimaxResult minimax_crossing(double r, double R, RobinParam h_in, RobinParam h_out, const SolverOptions& opts = {});

/// Radial integrals of the eigenfunction (as a function on the annulus, factor 2 pi t included).
double annulus_dirichlet_energy(const RadialEigen& eigen);
double annulus_l2_norm_squared(const RadialEigen& eigen);
/// h_in * int_{dB_r} v^2 + h_out * int_{dB_R} v^2 (Dirichlet terms contribute 0).
double annulus_boundary_term(const RadialEigen& eigen);

}  // namespace rfk::radial
