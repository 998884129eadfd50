#include "rfk/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"

#include "rfk/error.hpp"
#include "rfk/fem.hpp"
#include "rfk/flow.hpp"
#include "rfk/parallel.hpp"
#include "rfk/parallels.hpp"
#include "rfk/radial.hpp"
#include "rfk/svg.hpp"

namespace rfk::harness {

using geometry::kPi;
using geometry::kTwoPi;
using geometry::Side;
using geometry::StarBoundary;

// ---------------------------------------------------------------------------------------------
// Generators

namespace {

StarBoundary make_curve(const CurveTemplate& c, double scale, std::size_t samples) {
  std::vector<double> a{c.radius};
  for (double v : c.cos_coeffs) a.push_back(scale * v);
  std::vector<double> b;
  for (double v : c.sin_coeffs) b.push_back(scale * v);
  return StarBoundary(c.center, std::move(a), std::move(b), samples);
}

}  // namespace

DomainSpec generate_deficit_matched(const DeficitMatchedSpec& spec) {
  const StarBoundary inner = make_curve(spec.inner, 1.0, spec.samples);
  const double target = geometry::isoperimetric_deficit(inner);
  auto excess = [&](double t) { return geometry::isoperimetric_deficit(make_curve(spec.outer, t, spec.samples)) - target; };
  const double scale = std::pow(inner.perimeter(), 2);

  double lo = 0.0;
  double hi = spec.amplitude_cap;
  double t = 0.0;
  if (std::abs(excess(0.0)) > 1e-10 * scale) {
    double f_lo = excess(lo);
    double f_hi;
    try {
      f_hi = excess(hi);
    } catch (const Error&) {
      throw Error(ErrorCode::GenerationFailure, "outer curve is not star-shaped at the amplitude cap");
    }
    // Circle pairs already match up to the polygon error; no amplitude improves on that.
    const double polygon_floor = geometry::kCompatibilityTolerance * 4 * kPi * (spec.outer.radius * spec.outer.radius);
    if (f_lo * f_hi > 0.0 && std::abs(f_lo) <= polygon_floor) return DomainSpec(inner, make_curve(spec.outer, 0.0, spec.samples));
    if (f_lo * f_hi > 0.0) {
      throw Error(ErrorCode::GenerationFailure, "amplitude cap cannot reach the inner isoperimetric deficit");
    }
    for (int it = 0; it < 200; ++it) {
      t = 0.5 * (lo + hi);
      const double f = excess(t);
      if (std::abs(f) <= 1e-10 * scale || hi - lo < 1e-15 * spec.amplitude_cap) break;
      if ((f < 0.0) == (f_lo < 0.0)) {
        lo = t;
        f_lo = f;
      } else {
        hi = t;
      }
    }
  }
  try {
    return DomainSpec(inner, make_curve(spec.outer, t, spec.samples));
  } catch (const Error& e) {
    throw Error(ErrorCode::GenerationFailure, std::string("matched curves do not nest: ") + e.what());
  }
}

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Concentric: return "concentric";
    case FamilyKind::Eccentric: return "eccentric";
    case FamilyKind::FourierPerturbed: return "fourier";
    case FamilyKind::DeficitMatchedPair: return "deficit_matched";
  }
  return "?";
}

namespace {

FamilyKind parse_family(const std::string& s) {
  for (FamilyKind k : {FamilyKind::Concentric, FamilyKind::Eccentric, FamilyKind::FourierPerturbed,
                       FamilyKind::DeficitMatchedPair}) {
    if (s == to_string(k)) return k;
  }
  throw Error(ErrorCode::Parse, "unknown family kind '" + s + "'");
}

// Random coefficients for the given modes: magnitude in [lo, hi] * radius, uniform phase.
void random_modes(std::mt19937_64& rng, const std::vector<int>& modes, double lo, double hi, double radius,
                  CurveTemplate& c) {
  std::uniform_real_distribution<double> mag(lo, hi);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  for (int k : modes) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "Fourier modes start at 1");
    const auto idx = static_cast<std::size_t>(k - 1);
    if (c.cos_coeffs.size() <= idx) c.cos_coeffs.resize(idx + 1, 0.0);
    if (c.sin_coeffs.size() <= idx) c.sin_coeffs.resize(idx + 1, 0.0);
    const double m = mag(rng) * radius;
    const double p = phase(rng);
    c.cos_coeffs[idx] += m * std::cos(p);
    c.sin_coeffs[idx] += m * std::sin(p);
  }
}

Point random_offset(std::mt19937_64& rng, double lo, double hi) {
  if (hi <= 0.0) return {};
  std::uniform_real_distribution<double> d(lo, hi);
  std::uniform_real_distribution<double> a(0.0, kTwoPi);
  const double rho = d(rng);
  const double phi = a(rng);
  return {rho * std::cos(phi), rho * std::sin(phi)};
}

}  // namespace

std::vector<GeneratedDomain> generate_family(const FamilySpec& spec, std::size_t samples) {
  if (spec.count < 1) throw Error(ErrorCode::InvalidArgument, "family count must be positive");
  if (!(spec.R > spec.r && spec.r > 0.0)) throw Error(ErrorCode::InvalidArgument, "family needs R > r > 0");
  std::mt19937_64 rng(spec.seed);
  std::vector<GeneratedDomain> out;
  const std::string prefix = spec.id.empty() ? to_string(spec.kind) : spec.id;
  for (int n = 0; n < spec.count; ++n) {
    char id[128];
    std::snprintf(id, sizeof id, "%s_%02d", prefix.c_str(), n);
    CurveTemplate inner{random_offset(rng, spec.offset_min, spec.offset_max), spec.r, {}, {}};
    CurveTemplate outer{{}, spec.R, {}, {}};
    switch (spec.kind) {
      case FamilyKind::Concentric:
        inner.center = {};
        break;
      case FamilyKind::Eccentric:
        break;
      case FamilyKind::FourierPerturbed:
        random_modes(rng, spec.inner_modes, spec.inner_amplitude_min, spec.inner_amplitude_max, spec.r, inner);
        random_modes(rng, spec.outer_modes, spec.outer_amplitude_min, spec.outer_amplitude_max, spec.R, outer);
        break;
      case FamilyKind::DeficitMatchedPair: {
        random_modes(rng, spec.inner_modes, spec.inner_amplitude_min, spec.inner_amplitude_max, spec.r, inner);
        // Unit-magnitude pattern on the outer modes; the generator finds its amplitude.
        random_modes(rng, spec.outer_modes, 1.0, 1.0, 1.0, outer);
        const double norm_factor = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(1, spec.outer_modes.size())));
        for (double& v : outer.cos_coeffs) v *= norm_factor;
        for (double& v : outer.sin_coeffs) v *= norm_factor;
        out.push_back({id, spec.kind, generate_deficit_matched({inner, outer, spec.amplitude_cap * spec.R, samples}),
                       spec.regimes});
        continue;
      }
    }
    out.push_back({id, spec.kind, DomainSpec(make_curve(inner, 1.0, samples), make_curve(outer, 1.0, samples)),
                   spec.regimes});
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Configuration

std::vector<RobinPair> covered_regimes() {
  const RobinParam N = RobinParam::neumann();
  const RobinParam D = RobinParam::dirichlet();
  const RobinParam P = RobinParam::finite(1.0);
  const RobinParam M = RobinParam::finite(-1.0);
  return {{M, M}, {M, N}, {N, M}, {N, P}, {N, D}, {P, N}, {D, N}, {P, P}, {P, D}, {D, P}, {D, D}};
}

ExperimentConfig default_config() {
  const RobinParam N = RobinParam::neumann();
  const RobinParam D = RobinParam::dirichlet();
  const RobinParam P = RobinParam::finite(1.0);
  const RobinParam M = RobinParam::finite(-1.0);
  const std::vector<RobinPair> one_sided{{N, P}, {N, M}, {P, N}, {M, N}, {N, D}, {D, N}};
  const std::vector<RobinPair> two_sided{{P, P}, {M, M}, {D, D}, {D, P}, {P, D}};

  ExperimentConfig c;
  FamilySpec concentric;
  concentric.kind = FamilyKind::Concentric;
  concentric.id = "concentric";
  concentric.regimes = covered_regimes();

  FamilySpec ecc;
  ecc.kind = FamilyKind::Eccentric;
  ecc.id = "eccentric";
  ecc.count = 2;
  ecc.seed = 11;
  ecc.offset_min = 0.05;
  ecc.offset_max = 0.4;
  ecc.regimes = one_sided;

  FamilySpec fourier;
  fourier.kind = FamilyKind::FourierPerturbed;
  fourier.id = "fourier";
  fourier.count = 2;
  fourier.seed = 23;
  fourier.offset_max = 0.2;
  fourier.inner_modes = {2, 3, 4};
  fourier.inner_amplitude_min = 0.01;
  fourier.inner_amplitude_max = 0.05;
  fourier.outer_modes = {2, 3, 5};
  fourier.outer_amplitude_min = 0.01;
  fourier.outer_amplitude_max = 0.03;
  fourier.regimes = one_sided;

  FamilySpec matched;
  matched.kind = FamilyKind::DeficitMatchedPair;
  matched.id = "matched";
  matched.count = 2;
  matched.seed = 37;
  matched.offset_max = 0.15;
  matched.inner_modes = {3};
  matched.inner_amplitude_min = 0.05;
  matched.inner_amplitude_max = 0.12;
  matched.outer_modes = {4, 5};
  matched.amplitude_cap = 0.1;
  matched.regimes = two_sided;

  c.families = {concentric, ecc, fourier, matched};
  return c;
}

void validate(const ExperimentConfig& config) {
  if (config.families.empty()) throw Error(ErrorCode::InvalidArgument, "configuration lists no families");
  if (config.n_theta < 16 || config.n_theta > 2048 || config.n_radial < 4 || config.n_radial > 512) {
    throw Error(ErrorCode::InvalidArgument, "mesh resolution outside [16, 2048] x [4, 512]");
  }
  if (config.profile_resolution < 32 || config.profile_resolution > 8192) {
    throw Error(ErrorCode::InvalidArgument, "profile resolution outside [32, 8192]");
  }
  if (config.flow_resolution < 16 || config.flow_resolution > 4096) {
    throw Error(ErrorCode::InvalidArgument, "flow resolution outside [16, 4096]");
  }
  if (!(config.eps_chain >= 0.0 && config.eps_chain < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "eps_chain must lie in [0, 1)");
  }
  for (const FamilySpec& f : config.families) {
    if (f.regimes.empty()) throw Error(ErrorCode::InvalidArgument, "family '" + f.id + "' lists no regimes");
    for (const RobinPair& p : f.regimes) {
      if (p.product_sign() < 0) {
        throw Error(ErrorCode::InvalidArgument, "regime (" + p.inner.to_string() + ", " + p.outer.to_string() +
                                                    ") has h_in * h_out < 0, where no inequality is known");
      }
      if (p.is_pure_neumann()) throw Error(ErrorCode::InvalidArgument, "regime (0, 0) is excluded");
    }
  }
}

namespace {

using nlohmann::json;

std::vector<RobinPair> parse_regimes(const json& j) {
  std::vector<RobinPair> out;
  for (const json& r : j) {
    if (!r.is_array() || r.size() != 2) throw Error(ErrorCode::Parse, "regime must be a pair [h_in, h_out]");
    auto param = [](const json& v) {
      return v.is_string() ? RobinParam::parse(v.get<std::string>()) : RobinParam::finite(v.get<double>());
    };
    out.push_back({param(r[0]), param(r[1])});
  }
  return out;
}

void read_range(const json& f, const char* key, double& lo, double& hi) {
  if (!f.contains(key)) return;
  const json& v = f.at(key);
  if (v.is_array()) {
    if (v.size() != 2) throw Error(ErrorCode::Parse, std::string(key) + " must be [min, max]");
    lo = v[0].get<double>();
    hi = v[1].get<double>();
  } else {
    lo = hi = v.get<double>();
  }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (j.contains("mesh")) {
      c.n_theta = j["mesh"].value("n_theta", c.n_theta);
      c.n_radial = j["mesh"].value("n_radial", c.n_radial);
    }
    c.profile_resolution = j.value("profile_resolution", c.profile_resolution);
    c.flow_resolution = j.value("flow_resolution", c.flow_resolution);
    c.boundary_samples = j.value("boundary_samples", c.boundary_samples);
    c.eps_chain = j.value("eps_chain", c.eps_chain);
    c.run_parallels = j.value("parallels", c.run_parallels);
    c.run_flow = j.value("flow", c.run_flow);
    c.recheck_failures = j.value("recheck_failures", c.recheck_failures);
    c.plots = j.value("plots", c.plots);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.workers = j.value("workers", c.workers);
    const std::vector<RobinPair> shared = j.contains("regimes") ? parse_regimes(j["regimes"]) : covered_regimes();
    for (const json& f : j.at("families")) {
      FamilySpec s;
      s.kind = parse_family(f.at("kind").get<std::string>());
      s.id = f.value("id", std::string(to_string(s.kind)));
      s.count = f.value("count", 1);
      s.seed = f.value("seed", std::uint64_t{1});
      s.r = f.value("r", 1.0);
      s.R = f.value("R", 2.0);
      read_range(f, "offset", s.offset_min, s.offset_max);
      s.inner_modes = f.value("inner_modes", std::vector<int>{});
      read_range(f, "inner_amplitude", s.inner_amplitude_min, s.inner_amplitude_max);
      s.outer_modes = f.value("outer_modes", std::vector<int>{});
      read_range(f, "outer_amplitude", s.outer_amplitude_min, s.outer_amplitude_max);
      s.amplitude_cap = f.value("amplitude_cap", s.amplitude_cap);
      s.regimes = f.contains("regimes") ? parse_regimes(f["regimes"]) : shared;
      c.families.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open config '" + path + "'");
  return parse_config(in);
}

// ---------------------------------------------------------------------------------------------
// Rows

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Inconclusive: return "INCONCLUSIVE";
    case Status::Error: return "ERROR";
  }
  return "?";
}

int SuiteResult::count(Status s) const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [s](const VerificationRow& r) { return r.status == s; }));
}

namespace {

struct LemmaSink {
  const GeneratedDomain& domain;
  RobinPair robin;
  std::vector<LemmaResult>& out;

  void operator()(std::string property, double value, double tolerance, bool pass) {
    out.push_back({domain.id, robin, std::move(property), value, tolerance, pass});
  }
  // value <= tolerance
  void at_most(std::string property, double value, double tolerance) {
    (*this)(std::move(property), value, tolerance, value <= tolerance);
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

std::string file_stem(const GeneratedDomain& d, const RobinPair& p) {
  return d.id + "__" + p.inner.to_string() + "_" + p.outer.to_string();
}

void parallels_checks(const GeneratedDomain& d, const RobinPair& robin, const fem::Mesh& mesh, double lambda_domain,
                      const ExperimentConfig& cfg, int scale, VerificationRow& row, LemmaSink& lemma) {
  const Side side = robin.outer.is_neumann() ? Side::Inner : Side::Outer;
  const RobinParam h = side == Side::Inner ? robin.inner : robin.outer;
  parallels::ProfileOptions po;
  po.resolution = cfg.profile_resolution * scale;
  po.workers = 1;
  po.keep_every = cfg.plots && !cfg.output_dir.empty() ? std::max(1, po.resolution / 32) : 0;
  const parallels::ParallelProfile profile = parallels::level_lengths(d.domain, side, po);

  const auto nagy = parallels::nagy_check(profile);
  lemma.at_most("nagy_bound", nagy.worst_excess, 5e-3);
  const auto par = parallels::check_parametrization(profile);
  lemma("parametrization_width", profile.R - profile.r - profile.delta_star, profile.grid_step, par.width_ok);
  if (side == Side::Inner) {
    lemma("parametrization_terminal", profile.comparator_end - profile.param_star, 1e-3 * profile.comparator_end,
          par.terminal_ok);
  }
  lemma.at_most(side == Side::Inner ? "g_le_G" : "h_le_H", par.worst_g_excess, 5e-3);
  lemma.at_most("area_from_parametrization", par.area_error, 0.01);

  const radial::RadialEigen annulus = radial::lambda1_radial(
      side == Side::Inner ? radial::RadialProblem{profile.r, profile.R, h, RobinParam::neumann()}
                          : radial::RadialProblem{profile.r, profile.R, RobinParam::neumann(), h});
  const parallels::TestFunction v = side == Side::Inner
                                        ? parallels::build_test_function_RN(d.domain, h, annulus, profile, mesh)
                                        : parallels::build_test_function_NR(d.domain, h, annulus, profile, mesh);
  const auto s = parallels::sandwich_check(mesh, robin, v, lambda_domain, cfg.eps_chain);
  row.quotient = s.quotient;
  row.sandwich_ok = s.holds();
  const double scale_a = std::max(std::abs(s.lambda_annulus), 1e-12);
  lemma("sandwich_lower", s.lower_gap / scale_a, -cfg.eps_chain, s.lower_ok);
  lemma("sandwich_upper", s.upper_gap / scale_a, -cfg.eps_chain, s.upper_ok);
  if (side == Side::Inner) {
    lemma.at_most("coarea_energy", rel(s.test_parts.gradient, s.annulus_energy), 0.02);
  } else {
    // With l = int s the energy is int phi'(l)^2 s^2 dl, so s <= S only bounds it from above.
    lemma.at_most("coarea_energy_bound", (s.test_parts.gradient - s.annulus_energy) / s.annulus_energy, 0.02);
  }
  if (h.is_finite()) {
    const double l2_gap = (s.test_parts.l2 - s.annulus_l2) / s.annulus_l2;
    // Positive data: int v^2 >= int u^2; negative data reverses.
    lemma("l2_direction", l2_gap, 1e-3, h.sign() > 0 ? l2_gap >= -1e-3 : l2_gap <= 1e-3);
    const double bd = h.value() * (side == Side::Inner ? s.test_parts.inner : s.test_parts.outer);
    lemma.at_most("boundary_identity", rel(bd, s.annulus_boundary), 0.01);
  }
  if (po.keep_every > 0 && scale == 1) {
    parallels::plot_parallels((std::filesystem::path(cfg.output_dir) / (file_stem(d, robin) + "__parallels.svg")).string(),
                              d.domain, profile);
  }
}

void flow_checks(const GeneratedDomain& d, const RobinPair& robin, const fem::Mesh& mesh, const fem::EigenResult& eig,
                 const ExperimentConfig& cfg, int scale, LemmaSink& lemma) {
  const flow::MeshField field(mesh, eig);
  flow::DecomposeOptions o;
  o.resolution = cfg.flow_resolution * scale;
  o.workers = 1;
  flow::FlowDecomposition dec;
  try {
    dec = flow::decompose(field, o);
  } catch (const Error&) {
    lemma("flow_decomposition", 1.0, 0.0, false);
    return;
  }
  const double unresolved = static_cast<double>(dec.unresolved) / dec.cells_in_domain;
  lemma.at_most("flow_unresolved_fraction", unresolved, 0.02);
  lemma("cut_single_curve", static_cast<double>(dec.cut_chains.size()), 1.0, dec.cut_chains.size() == 1);
  lemma.at_most("cut_neumann_residual", flow::cut_neumann_residual(field, dec.cut), 0.05);
  const flow::BasinAreas areas = flow::basin_areas(mesh, dec);
  lemma.at_most("basin_area_sum", rel(areas.in + areas.out, areas.total), 0.02);
  try {
    const double q_in = flow::restricted_rayleigh(mesh, eig.u, dec, Side::Inner, robin);
    const double q_out = flow::restricted_rayleigh(mesh, eig.u, dec, Side::Outer, robin);
    lemma.at_most("restricted_quotient_inner", rel(q_in, eig.lambda1), 0.03);
    lemma.at_most("restricted_quotient_outer", rel(q_out, eig.lambda1), 0.03);
  } catch (const Error&) {
    lemma("restricted_quotient_basin", 0.0, 0.0, false);
  }
  const flow::InterfaceRadii radii = flow::interface_radii(d.domain, areas);
  lemma.at_most("sigma_consistency", rel(radii.sigma_in, radii.sigma_out), 0.02);
  if (cfg.plots && !cfg.output_dir.empty() && scale == 1) {
    flow::plot_flow((std::filesystem::path(cfg.output_dir) / (file_stem(d, robin) + "__flow.svg")).string(), d.domain,
                    dec);
  }
}

}  // namespace

RowResult evaluate_row(const GeneratedDomain& d, const RobinPair& robin, const ExperimentConfig& cfg, int scale) {
  RowResult out;
  VerificationRow& row = out.row;
  row.domain_id = d.id;
  row.family = d.family;
  row.robin = robin;
  row.n_theta = cfg.n_theta * scale;
  row.n_radial = cfg.n_radial * scale;
  LemmaSink lemma{d, robin, out.lemmas};
  try {
    const geometry::AnnulusMatch match = geometry::match_annulus(d.domain, robin);
    row.r = match.r;
    row.R = match.R;
    if (!robin.inner.is_neumann() && !robin.outer.is_neumann()) {
      lemma.at_most("robin_robin_compatibility", std::abs(match.compatibility_residual),
                    geometry::kCompatibilityTolerance);
    }
    const fem::Mesh coarse = fem::build_mesh(d.domain, row.n_theta, row.n_radial);
    const fem::Mesh fine = fem::build_mesh(d.domain, 2 * row.n_theta, 2 * row.n_radial);
    row.lambda_coarse = fem::solve(coarse, robin).lambda1;
    const fem::EigenResult eig = fem::solve(fine, robin);
    row.lambda_domain = eig.lambda1;
    row.lambda_annulus = radial::lambda1_radial({row.r, row.R, robin.inner, robin.outer}).lambda1;
    row.margin = row.lambda_annulus - row.lambda_domain;
    const double scale_a = std::max(std::abs(row.lambda_annulus), 1e-12);
    row.relative_margin = row.margin / scale_a;
    // Refinement must not move the margin toward a violation unless it also shrinks. Boundary
    // polygons change between levels, so the eigenvalues need not decrease.
    const double coarse_margin = row.lambda_annulus - row.lambda_coarse;
    row.trend_monotone = row.margin >= coarse_margin - 1e-10 * scale_a || std::abs(row.margin) <= std::abs(coarse_margin);

    const int expected_sign = robin.inner.sign() + robin.outer.sign() > 0 ? 1 : -1;
    lemma("sign_dichotomy", row.lambda_domain, 0.0, expected_sign * row.lambda_domain > 0.0);

    if (cfg.run_parallels && (robin.inner.is_neumann() != robin.outer.is_neumann())) {
      parallels_checks(d, robin, fine, row.lambda_domain, cfg, scale, row, lemma);
    }
    if (cfg.run_flow && robin.product_sign() > 0) flow_checks(d, robin, fine, eig, cfg, scale, lemma);

    const bool inequality_ok = row.relative_margin >= -cfg.eps_chain;
    if (!inequality_ok || !row.sandwich_ok) {
      row.status = Status::Fail;
      if (!row.sandwich_ok) row.note = "test-function sandwich violated";
    } else if (std::abs(row.relative_margin) < cfg.eps_chain && !row.trend_monotone) {
      row.status = Status::Inconclusive;
      row.note = "refinement moves the margin toward a violation";
    } else {
      row.status = Status::Pass;
    }
  } catch (const Error& e) {
    row.status = Status::Error;
    row.note = e.what();
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Suite

namespace {

void csv_number(std::ostream& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out << buf;
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void plot_domain(const std::string& path, const DomainSpec& domain) {
  geometry::BoundingBox box = domain.bounds();
  const double pad = 0.05 * std::max(box.hi.x - box.lo.x, box.hi.y - box.lo.y);
  box.lo = box.lo - Point{pad, pad};
  box.hi = box.hi + Point{pad, pad};
  svg::Canvas canvas(box, 480.0);
  canvas.polyline(domain.outer().polyline(), "black", 1.5, true);
  canvas.polyline(domain.inner().polyline(), "black", 1.5, true);
  canvas.save(path);
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<VerificationRow>& rows) {
  out << "domain_id,family,h_in,h_out,r,R,n_theta,n_radial,lambda_coarse,lambda_domain,lambda_annulus,quotient,"
         "margin,relative_margin,trend,status,rechecked,note\n";
  for (const VerificationRow& r : rows) {
    out << r.domain_id << ',' << to_string(r.family) << ',' << r.robin.inner.to_string() << ','
        << r.robin.outer.to_string() << ',';
    csv_number(out, r.r);
    out << ',';
    csv_number(out, r.R);
    out << ',' << r.n_theta << ',' << r.n_radial << ',';
    csv_number(out, r.lambda_coarse);
    out << ',';
    csv_number(out, r.lambda_domain);
    out << ',';
    csv_number(out, r.lambda_annulus);
    out << ',';
    if (r.quotient) csv_number(out, *r.quotient);
    out << ',';
    csv_number(out, r.margin);
    out << ',';
    csv_number(out, r.relative_margin);
    out << ',' << (r.trend_monotone ? "monotone" : "nonmonotone") << ',' << to_string(r.status) << ','
        << (r.rechecked ? 1 : 0) << ',' << csv_text(r.note) << '\n';
  }
}

void write_lemmas_csv(std::ostream& out, const std::vector<LemmaResult>& lemmas) {
  out << "domain_id,h_in,h_out,property,value,tolerance,status\n";
  for (const LemmaResult& l : lemmas) {
    out << l.domain_id << ',' << l.robin.inner.to_string() << ',' << l.robin.outer.to_string() << ',' << l.property
        << ',';
    csv_number(out, l.value);
    out << ',';
    csv_number(out, l.tolerance);
    out << ',' << (l.pass ? "PASS" : "FAIL") << '\n';
  }
}

SuiteResult run_rfk_suite(const ExperimentConfig& config) {
  validate(config);
  std::vector<GeneratedDomain> domains;
  std::vector<std::pair<std::size_t, RobinPair>> tasks;
  std::vector<std::string> generation_errors;
  for (const FamilySpec& f : config.families) {
    for (GeneratedDomain& g : generate_family(f, config.boundary_samples)) {
      for (const RobinPair& p : g.regimes) tasks.emplace_back(domains.size(), p);
      domains.push_back(std::move(g));
    }
  }
  if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);

  std::vector<RowResult> results(tasks.size());
  parallel_for(
      tasks.size(),
      [&](std::size_t k) {
        const auto& [di, robin] = tasks[k];
        RowResult r = evaluate_row(domains[di], robin, config, 1);
        if (r.row.status == Status::Fail && config.recheck_failures) {
          // A genuine violation survives refinement; a discretization artifact does not.
          r = evaluate_row(domains[di], robin, config, 2);
          r.row.rechecked = true;
        }
        results[k] = std::move(r);
      },
      config.workers);

  SuiteResult suite;
  for (RowResult& r : results) {
    suite.rows.push_back(std::move(r.row));
    for (LemmaResult& l : r.lemmas) suite.lemmas.push_back(std::move(l));
  }
  if (!config.output_dir.empty()) {
    const std::filesystem::path dir(config.output_dir);
    std::ofstream results_csv(dir / "results.csv");
    write_results_csv(results_csv, suite.rows);
    std::ofstream lemmas_csv(dir / "lemmas.csv");
    write_lemmas_csv(lemmas_csv, suite.lemmas);
    if (config.plots) {
      for (const GeneratedDomain& g : domains) plot_domain((dir / (g.id + ".svg")).string(), g.domain);
    }
  }
  return suite;
}

}  // namespace rfk::harness
