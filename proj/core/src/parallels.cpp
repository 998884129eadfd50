#include "rfk/parallels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "rfk/error.hpp"
#include "rfk/svg.hpp"

namespace rfk::parallels {

using geometry::kPi;
using geometry::kTwoPi;
using geometry::norm;
using geometry::Point;

namespace {

std::size_t upper_index(const std::vector<double>& xs, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - xs.begin(), 1, static_cast<std::ptrdiff_t>(xs.size()) - 1));
}

// Portion of [a, b] where keep > 0, assuming at most one crossing along the segment.
double clipped_length(Point a, Point b, double ka, double kb, const auto& keep) {
  const bool in_a = ka > 0.0;
  const bool in_b = kb > 0.0;
  if (in_a && in_b) return norm(b - a);
  if (!in_a && !in_b) return 0.0;
  double lo = 0.0;  // parameter on the inside end
  double hi = 1.0;
  const Point from = in_a ? a : b;
  const Point to = in_a ? b : a;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (keep(from + mid * (to - from)) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) * norm(to - from);
}

}  // namespace

double ParallelProfile::param_at(double d) const {
  if (d <= 0.0) return 0.0;
  if (d >= delta.back()) return param_star;
  const std::size_t k = upper_index(delta, d);
  const double w = (d - delta[k - 1]) / (delta[k] - delta[k - 1]);
  return (1.0 - w) * param[k - 1] + w * param[k];
}

double ParallelProfile::comparator_at(double d) const {
  if (side == Side::Inner) return std::log1p(d / r) / kTwoPi;
  return kTwoPi * R * d - kPi * d * d;
}

double ParallelProfile::comparator_inverse(double alpha) const {
  if (side == Side::Inner) return r * std::expm1(kTwoPi * alpha);
  return R - std::sqrt(std::max(0.0, R * R - alpha / kPi));
}

double ParallelProfile::g_squared_integral() const {
  if (side == Side::Outer) return param_star;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < delta.size(); ++k) {
    acc += 0.5 * (s[k] * s[k] + s[k + 1] * s[k + 1]) * (param[k + 1] - param[k]);
  }
  return acc;
}

ParallelProfile level_lengths(const DomainSpec& domain, Side side, const ProfileOptions& opts) {
  const geometry::StarBoundary& own = domain.boundary(side);
  const geometry::StarBoundary& other = domain.boundary(side == Side::Inner ? Side::Outer : Side::Inner);

  ParallelProfile p;
  p.side = side;
  const RobinPair probe = side == Side::Inner ? RobinPair{RobinParam::finite(1.0), RobinParam::neumann()}
                                              : RobinPair{RobinParam::neumann(), RobinParam::finite(1.0)};
  const geometry::AnnulusMatch match = geometry::match_annulus(domain, probe);
  p.r = match.r;
  p.R = match.R;
  p.area = geometry::area(domain);
  p.boundary_length = own.perimeter();

  // Distance to the chosen boundary, positive on the Omega side of it.
  const geometry::PolylineDistance dist(own.polyline());
  const double sign_inside = side == Side::Inner ? -1.0 : 1.0;
  contour::Grid grid = contour::make_grid(domain.bounds(), opts.resolution);
  p.grid_step = grid.step;
  contour::sample(
      grid, [&](Point x) { return (own.contains(x) ? sign_inside : -sign_inside) * dist(x); }, opts.workers);

  // Membership of the other side of Omega: outside the hole, or inside the outer curve.
  auto keep = [&](Point x) { return side == Side::Inner ? -other.radial_excess(x) : other.radial_excess(x); };

  double fmax = 0.0;
  for (double v : grid.values) fmax = std::max(fmax, v);
  const int count = std::max(1, static_cast<int>(std::ceil(fmax / grid.step)));
  std::vector<double> length(static_cast<std::size_t>(count), 0.0);
  std::vector<std::vector<contour::Segment>> kept(static_cast<std::size_t>(count));
  contour::for_each_level_segment(grid, grid.step, grid.step, count, [&](int k, const contour::Segment& seg) {
    const double ka = keep(seg.a);
    const double kb = keep(seg.b);
    const double len = clipped_length(seg.a, seg.b, ka, kb, keep);
    length[static_cast<std::size_t>(k)] += len;
    if (opts.keep_every > 0 && (k + 1) % opts.keep_every == 0 && len > 0.0) {
      contour::Segment c = seg;
      if (!(ka > 0.0 && kb > 0.0)) {
        // Trim the outside end for plotting.
        const Point from = ka > 0.0 ? seg.a : seg.b;
        const Point to = ka > 0.0 ? seg.b : seg.a;
        const double frac = len / norm(to - from);
        c.a = from;
        c.b = from + frac * (to - from);
      }
      kept[static_cast<std::size_t>(k)].push_back(c);
    }
  });

  const double threshold = opts.support_threshold * p.boundary_length;
  int last = -1;
  for (int k = 0; k < count; ++k) {
    if (length[static_cast<std::size_t>(k)] > threshold) last = k;
  }
  if (last < 0) throw Error(ErrorCode::DegenerateProfile, "no distance level set has positive length inside the domain");

  p.delta.push_back(0.0);
  p.s.push_back(p.boundary_length);
  for (int k = 0; k <= last; ++k) {
    p.delta.push_back((k + 1) * grid.step);
    p.s.push_back(length[static_cast<std::size_t>(k)]);
  }
  p.delta_star = p.delta.back();
  p.param.assign(p.delta.size(), 0.0);
  for (std::size_t k = 0; k < p.delta.size(); ++k) {
    const double d = p.delta[k];
    p.S.push_back(side == Side::Inner ? kTwoPi * (p.r + d) : kTwoPi * (p.R - d));
    p.comparator.push_back(p.comparator_at(d));
    if (k > 0) {
      const double h = d - p.delta[k - 1];
      // Zero-length levels inside the support are skipped in 1/s; they have measure zero in delta.
      const double f0 = side == Side::Inner ? (p.s[k - 1] > 0.0 ? 1.0 / p.s[k - 1] : 0.0) : p.s[k - 1];
      const double f1 = side == Side::Inner ? (p.s[k] > 0.0 ? 1.0 / p.s[k] : 0.0) : p.s[k];
      p.param[k] = p.param[k - 1] + 0.5 * h * (f0 + f1);
    }
  }
  p.param_star = p.param.back();
  p.comparator_end = p.comparator_at(p.R - p.r);
  if (opts.keep_every > 0) {
    for (int k = 0; k <= last; ++k) {
      if (!kept[static_cast<std::size_t>(k)].empty()) {
        p.curves.push_back({(k + 1) * grid.step, std::move(kept[static_cast<std::size_t>(k)])});
      }
    }
  }
  return p;
}

NagyReport nagy_check(const ParallelProfile& profile, double rel_tol) {
  NagyReport rep;
  rep.worst_excess = -1.0;
  for (std::size_t k = 0; k < profile.delta.size(); ++k) {
    const double S = profile.S[k];
    if (!(S > 0.0)) continue;
    const double excess = (profile.s[k] - S) / S;
    rep.worst_excess = std::max(rep.worst_excess, excess);
    if (excess > rel_tol) ++rep.violations;
  }
  return rep;
}

ParametrizationReport check_parametrization(const ParallelProfile& profile, double terminal_tol) {
  ParametrizationReport rep;
  rep.width_ok = profile.R - profile.r <= profile.delta_star + profile.grid_step;
  rep.terminal_ok = profile.side == Side::Outer ||
                    profile.comparator_end <= profile.param_star + terminal_tol * profile.comparator_end;
  rep.worst_g_excess = -1.0;
  for (std::size_t k = 0; k < profile.delta.size(); ++k) {
    const double alpha = profile.param[k];
    if (alpha > profile.comparator_end) break;
    const double back = profile.comparator_inverse(alpha);
    const double G = profile.side == Side::Inner ? kTwoPi * (profile.r + back) : kTwoPi * (profile.R - back);
    if (G > 0.0) rep.worst_g_excess = std::max(rep.worst_g_excess, (profile.s[k] - G) / G);
  }
  rep.area_error = std::abs(profile.g_squared_integral() - profile.area) / profile.area;
  return rep;
}

namespace {

void check_consistency(const ParallelProfile& profile, const radial::RadialEigen& annulus, Side side) {
  if (profile.side != side) throw Error(ErrorCode::InconsistentInput, "profile is for the other boundary side");
  const radial::RadialProblem& pr = annulus.problem;
  if (std::abs(pr.r - profile.r) > 1e-6 * profile.r || std::abs(pr.R - profile.R) > 1e-6 * profile.R) {
    throw Error(ErrorCode::InconsistentInput, "radial solution is not on the matched annulus");
  }
  const RobinParam neumann_side = side == Side::Inner ? pr.h_out : pr.h_in;
  if (!neumann_side.is_neumann()) {
    throw Error(ErrorCode::InconsistentInput, "radial solution must be Neumann on the unmatched side");
  }
}

std::vector<double> nodal_distance(const geometry::StarBoundary& b, const fem::Mesh& mesh, fem::NodeKind on) {
  const geometry::PolylineDistance dist(b.polyline());
  std::vector<double> d(mesh.nodes.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = mesh.node_kinds[i] == on ? 0.0 : dist(mesh.nodes[i]);
  return d;
}

void finish(TestFunction& tf) {
  const auto [lo, hi] = std::minmax_element(tf.values.begin(), tf.values.end());
  tf.v_min = *lo;
  tf.v_max = *hi;
}

}  // namespace

TestFunction build_test_function_RN(const DomainSpec& domain, RobinParam h_in, const radial::RadialEigen& annulus,
                                    const ParallelProfile& profile, const fem::Mesh& mesh) {
  check_consistency(profile, annulus, Side::Inner);
  if (annulus.problem.h_in != h_in) throw Error(ErrorCode::InconsistentInput, "radial solution has a different h_in");
  TestFunction tf;
  tf.side = Side::Inner;
  tf.annulus = annulus;
  tf.cap = annulus.value_at(profile.R);
  const auto d = nodal_distance(domain.inner(), mesh, fem::NodeKind::InnerBoundary);
  tf.values.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double t = profile.param_at(d[i]);
    const double radius = profile.r * std::exp(kTwoPi * t);
    tf.values[i] = radius >= profile.R ? tf.cap : annulus.value_at(radius);
    if (h_in.is_dirichlet() && mesh.node_kinds[i] == fem::NodeKind::InnerBoundary) tf.values[i] = 0.0;
  }
  finish(tf);
  return tf;
}

TestFunction build_test_function_NR(const DomainSpec& domain, RobinParam h_out, const radial::RadialEigen& annulus,
                                    const ParallelProfile& profile, const fem::Mesh& mesh) {
  check_consistency(profile, annulus, Side::Outer);
  if (annulus.problem.h_out != h_out) throw Error(ErrorCode::InconsistentInput, "radial solution has a different h_out");
  TestFunction tf;
  tf.side = Side::Outer;
  tf.annulus = annulus;
  tf.cap = annulus.value_at(profile.r);
  const double full = kPi * (profile.R * profile.R - profile.r * profile.r);
  const auto d = nodal_distance(domain.outer(), mesh, fem::NodeKind::OuterBoundary);
  tf.values.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double l = std::min(profile.param_at(d[i]), full);
    const double radius = std::sqrt(std::max(profile.r * profile.r, profile.R * profile.R - l / kPi));
    tf.values[i] = annulus.value_at(radius);
    if (h_out.is_dirichlet() && mesh.node_kinds[i] == fem::NodeKind::OuterBoundary) tf.values[i] = 0.0;
  }
  finish(tf);
  return tf;
}

SandwichReport sandwich_check(const fem::Mesh& mesh, const RobinPair& robin, const TestFunction& test,
                              double lambda_domain, double eps_chain) {
  SandwichReport rep;
  rep.eps_chain = eps_chain;
  rep.quotient = fem::rayleigh_quotient(mesh, robin, test.values);
  rep.test_parts = fem::quotient_parts(mesh, test.values);
  rep.lambda_domain = lambda_domain;
  rep.lambda_annulus = test.annulus.lambda1;
  rep.annulus_energy = radial::annulus_dirichlet_energy(test.annulus);
  rep.annulus_l2 = radial::annulus_l2_norm_squared(test.annulus);
  rep.annulus_boundary = radial::annulus_boundary_term(test.annulus);
  rep.lower_gap = rep.quotient - rep.lambda_domain;
  rep.upper_gap = rep.lambda_annulus - rep.quotient;
  const double scale = std::max(std::abs(rep.lambda_annulus), 1e-12);
  rep.lower_ok = rep.lower_gap >= -eps_chain * scale;
  rep.upper_ok = rep.upper_gap >= -eps_chain * scale;
  return rep;
}

SandwichReport sandwich_check(const DomainSpec& /*domain*/, const RobinPair& robin, const TestFunction& test,
                              const fem::Mesh& mesh, double eps_chain) {
  return sandwich_check(mesh, robin, test, fem::solve(mesh, robin).lambda1, eps_chain);
}

void write_profile_csv(std::ostream& out, const ParallelProfile& profile) {
  out << (profile.side == Side::Inner ? "delta,s,S,t,T\n" : "delta,s,S,l,L\n");
  char buf[160];
  for (std::size_t k = 0; k < profile.delta.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g\n", profile.delta[k], profile.s[k], profile.S[k],
                  profile.param[k], profile.comparator[k]);
    out << buf;
  }
}

void plot_parallels(const std::string& path, const DomainSpec& domain, const ParallelProfile& profile) {
  geometry::BoundingBox box = domain.bounds();
  const double pad = 0.05 * std::max(box.hi.x - box.lo.x, box.hi.y - box.lo.y);
  box.lo = box.lo - Point{pad, pad};
  box.hi = box.hi + Point{pad, pad};
  svg::Canvas canvas(box);
  canvas.polyline(domain.outer().polyline(), "black", 1.5, true);
  canvas.polyline(domain.inner().polyline(), "black", 1.5, true);
  for (const LevelCurve& c : profile.curves) {
    for (const auto& s : c.segments) canvas.segment(s.a, s.b, "#1f77b4", 0.8);
  }
  canvas.text({box.lo.x + pad * 0.2, box.hi.y - pad * 0.6},
              std::string(geometry::to_string(profile.side)) + " parallels, delta_* = " + std::to_string(profile.delta_star));
  canvas.save(path);
}

}  // namespace rfk::parallels
