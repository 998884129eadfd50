#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rfk/contour.hpp"
#include "rfk/fem.hpp"
#include "rfk/geometry.hpp"
#include "rfk/radial.hpp"
#include "rfk/robin.hpp"

namespace rfk::parallels {

using geometry::DomainSpec;
using geometry::Side;

struct ProfileOptions {
  /// Background cells along the longer side of the domain's bounding box.
  int resolution = 1024;
  /// delta_* is the last level whose length exceeds this fraction of the boundary length.
  double support_threshold = 1e-3;
  /// Keep the clipped segments of every n-th level for plotting (0 keeps none).
  int keep_every = 0;
  unsigned workers = 0;
};

struct LevelCurve {
  double delta = 0.0;
  std::vector<contour::Segment> segments;
};

/// Lengths s(delta) of the distance level sets {d(., dOmega_side) = delta} inside Omega, with the
/// matched-annulus comparator S and the parametrizations
///   inner side:  t = int 1/s,  T(delta) = ln(1 + delta/r) / (2 pi),
///   outer side:  l = int s,    L(delta) = 2 pi R delta - pi delta^2.
struct ParallelProfile {
  Side side = Side::Inner;
  /// Annulus matched by area and the perimeter of this side.
  double r = 0.0;
  double R = 0.0;
  double area = 0.0;
  double boundary_length = 0.0;
  double grid_step = 0.0;

  std::vector<double> delta;       // 0 = delta_0 < ... < delta_*
  std::vector<double> s;           // s(0) is the exact boundary length
  std::vector<double> S;           // 2 pi (r + delta) or 2 pi (R - delta)
  std::vector<double> param;       // t or l at delta
  std::vector<double> comparator;  // T or L at delta
  double delta_star = 0.0;
  /// t_* (inner) or l(delta_*) (outer).
  double param_star = 0.0;
  /// T_# = T(R - r) (inner) or L(R - r) = |A_{r,R}| (outer).
  double comparator_end = 0.0;

  std::vector<LevelCurve> curves;

  /// t(delta) or l(delta) by linear interpolation; saturates at param_star beyond delta_*.
  double param_at(double d) const;
  /// Exact comparator T(delta) or L(delta).
  double comparator_at(double d) const;
  /// delta with comparator(delta) = alpha.
  double comparator_inverse(double alpha) const;
  /// Integral of g^2 over [0, t_*] (inner) or of h over [0, l_*] (outer); both estimate |Omega|.
  double g_squared_integral() const;
};

/// Samples the distance field on a background grid, extracts every level delta_k = k * step by
/// marching squares and sums the segment lengths inside Omega. Throws Error(DegenerateProfile) if
/// no level set has positive length.
ParallelProfile level_lengths(const DomainSpec& domain, Side side, const ProfileOptions& opts = {});

struct NagyReport {
  int violations = 0;
  /// max over the grid of (s - S) / S.
  double worst_excess = 0.0;
};

/// s(delta) <= S(delta) (1 + rel_tol) at every grid level.
NagyReport nagy_check(const ParallelProfile& profile, double rel_tol = 5e-3);

struct ParametrizationReport {
  /// R - r <= delta_* + grid step.
  bool width_ok = false;
  /// Inner side: T_# <= t_* + tol. Outer side: always true.
  bool terminal_ok = false;
  /// max over the grid of (g - G) / G on [0, T_#] (resp. (h - H) / H on [0, |Omega|]).
  double worst_g_excess = 0.0;
  /// |g_squared_integral - |Omega|| / |Omega|.
  double area_error = 0.0;
};

ParametrizationReport check_parametrization(const ParallelProfile& profile, double terminal_tol = 1e-3);

/// Test function built from the radial eigenfunction of the matched annulus.
struct TestFunction {
  Side side = Side::Inner;
  std::vector<double> values;
  /// Value used past T_# (inner side): u_max for h_in > 0, u_min for h_in < 0.
  double cap = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
  radial::RadialEigen annulus;
};

/// v(x) = phi(t(d(x, dOmega_in))) with phi = w o T^{-1}, i.e. v = u_rad(r exp(2 pi t)), capped at
/// u_rad(R) once t exceeds T_#. Requires h_out = 0 on the annulus solution.
TestFunction build_test_function_RN(const DomainSpec& domain, RobinParam h_in, const radial::RadialEigen& annulus,
                                    const ParallelProfile& profile, const fem::Mesh& mesh);

/// v(x) = phi(l(d(x, dOmega_out))) with phi = w o L^{-1}, i.e. v = u_rad(sqrt(R^2 - l / pi)).
/// Requires h_in = 0 on the annulus solution.
TestFunction build_test_function_NR(const DomainSpec& domain, RobinParam h_out, const radial::RadialEigen& annulus,
                                    const ParallelProfile& profile, const fem::Mesh& mesh);

struct SandwichReport {
  double quotient = 0.0;
  double lambda_domain = 0.0;
  double lambda_annulus = 0.0;
  /// quotient - lambda_domain (>= 0 in exact arithmetic).
  double lower_gap = 0.0;
  /// lambda_annulus - quotient (>= 0 in exact arithmetic).
  double upper_gap = 0.0;
  double eps_chain = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
  fem::QuotientParts test_parts;
  double annulus_energy = 0.0;
  double annulus_l2 = 0.0;
  double annulus_boundary = 0.0;

  bool holds() const { return lower_ok && upper_ok; }
};

/// lambda_domain <= Q(v) + eps |lambda_A| and Q(v) <= lambda_A + eps |lambda_A| (|lambda_A| floored at
/// 1e-12). Violations are reported, never thrown.
SandwichReport sandwich_check(const fem::Mesh& mesh, const RobinPair& robin, const TestFunction& test,
                              double lambda_domain, double eps_chain = 0.02);

/// Same, solving the FEM eigenproblem on `mesh` first.
SandwichReport sandwich_check(const DomainSpec& domain, const RobinPair& robin, const TestFunction& test,
                              const fem::Mesh& mesh, double eps_chain = 0.02);

/// CSV with columns delta,s,S,t,T (inner) or delta,s,S,l,L (outer).
void write_profile_csv(std::ostream& out, const ParallelProfile& profile);

/// Domain outline plus the stored level curves.
void plot_parallels(const std::string& path, const DomainSpec& domain, const ParallelProfile& profile);

}  // namespace rfk::parallels
