// rfk-lab: command line front end for the reverse Faber-Krahn verification pipeline.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rfk/error.hpp"
#include "rfk/fem.hpp"
#include "rfk/flow.hpp"
#include "rfk/geometry.hpp"
#include "rfk/harness.hpp"
#include "rfk/parallels.hpp"
#include "rfk/radial.hpp"

namespace {

using namespace rfk;

// Writes to `path`, or stdout when empty / "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  fn(out);
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int run_verify(const std::string& config_path, const std::string& output_dir, unsigned workers, bool no_plots) {
  harness::ExperimentConfig cfg = config_path.empty() ? harness::default_config() : harness::load_config(config_path);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (cfg.output_dir.empty()) cfg.output_dir = "rfk-results";
  if (workers > 0) cfg.workers = workers;
  if (no_plots) cfg.plots = false;
  const harness::SuiteResult s = harness::run_rfk_suite(cfg);
  int lemma_failures = 0;
  for (const auto& l : s.lemmas) lemma_failures += l.pass ? 0 : 1;
  std::cout << s.rows.size() << " rows: " << s.count(harness::Status::Pass) << " PASS, "
            << s.count(harness::Status::Fail) << " FAIL, " << s.count(harness::Status::Inconclusive)
            << " INCONCLUSIVE, " << s.count(harness::Status::Error) << " ERROR; " << s.lemmas.size() << " lemma checks, "
            << lemma_failures << " failed\n"
            << "results in " << cfg.output_dir << "\n";
  for (const auto& r : s.rows) {
    if (r.status == harness::Status::Fail || r.status == harness::Status::Error) {
      std::cout << "  " << harness::to_string(r.status) << " " << r.domain_id << " (" << r.robin.inner.to_string()
                << ", " << r.robin.outer.to_string() << ") " << r.note << "\n";
    }
  }
  return s.any_failure() ? 1 : 0;
}

int run_radial(double r, double R, const std::string& hin, const std::string& hout) {
  const radial::RadialProblem p{r, R, RobinParam::parse(hin), RobinParam::parse(hout)};
  const radial::RadialEigen e = radial::lambda1_radial(p);
  std::cout << "r,R,h_in,h_out,lambda1,sigma\n"
            << num(r) << ',' << num(R) << ',' << p.h_in.to_string() << ',' << p.h_out.to_string() << ','
            << num(e.lambda1) << ',' << (e.sigma ? num(*e.sigma) : std::string()) << '\n';
  return 0;
}

int run_profile(const std::string& domain_path, const std::string& side_name, int resolution, const std::string& csv,
                const std::string& plot) {
  const geometry::DomainSpec d = geometry::load_domain(domain_path);
  geometry::Side side;
  if (side_name == "inner") side = geometry::Side::Inner;
  else if (side_name == "outer") side = geometry::Side::Outer;
  else throw Error(ErrorCode::InvalidArgument, "--side must be inner or outer");
  parallels::ProfileOptions o;
  o.resolution = resolution;
  o.keep_every = plot.empty() ? 0 : std::max(1, resolution / 32);
  const parallels::ParallelProfile p = parallels::level_lengths(d, side, o);
  with_output(csv, [&](std::ostream& out) { parallels::write_profile_csv(out, p); });
  const auto nagy = parallels::nagy_check(p);
  const auto par = parallels::check_parametrization(p);
  std::cerr << "r=" << num(p.r) << " R=" << num(p.R) << " delta_star=" << num(p.delta_star)
            << " nagy_violations=" << nagy.violations << " area_error=" << num(par.area_error) << "\n";
  if (!plot.empty()) parallels::plot_parallels(plot, d, p);
  return 0;
}

int run_flow(const std::string& domain_path, const std::string& hin, const std::string& hout, int n_theta,
             int n_radial, int resolution, const std::string& labels, const std::string& plot) {
  const geometry::DomainSpec d = geometry::load_domain(domain_path);
  const RobinPair robin{RobinParam::parse(hin), RobinParam::parse(hout)};
  const fem::Mesh mesh = fem::build_mesh(d, n_theta, n_radial);
  const fem::EigenResult eig = fem::solve(mesh, robin);
  const flow::MeshField field(mesh, eig);
  flow::DecomposeOptions o;
  o.resolution = resolution;
  const flow::FlowDecomposition dec = flow::decompose(field, o);
  const flow::BasinAreas areas = flow::basin_areas(mesh, dec);
  const flow::InterfaceRadii radii = flow::interface_radii(d, areas);
  std::cout << "lambda1," << num(eig.lambda1) << "\n"
            << "direction," << (dec.direction == flow::Direction::Forward ? "forward" : "backward") << "\n"
            << "unresolved_fraction," << num(static_cast<double>(dec.unresolved) / dec.cells_in_domain) << "\n"
            << "area_in," << num(areas.in) << "\narea_out," << num(areas.out) << "\narea_total," << num(areas.total)
            << "\n"
            << "sigma_in," << num(radii.sigma_in) << "\nsigma_out," << num(radii.sigma_out) << "\n"
            << "cut_chains," << dec.cut_chains.size() << "\n"
            << "cut_neumann_residual," << num(flow::cut_neumann_residual(field, dec.cut)) << "\n";
  if (robin.product_sign() > 0) {
    std::cout << "quotient_in," << num(flow::restricted_rayleigh(mesh, eig.u, dec, geometry::Side::Inner, robin))
              << "\nquotient_out," << num(flow::restricted_rayleigh(mesh, eig.u, dec, geometry::Side::Outer, robin))
              << "\n";
  }
  if (!labels.empty()) with_output(labels, [&](std::ostream& out) { flow::write_labels_csv(out, dec); });
  if (!plot.empty()) flow::plot_flow(plot, d, dec);
  return 0;
}

int run_eig(const std::string& domain_path, double r, double R, const std::string& hin, const std::string& hout,
            int n_theta, int n_radial, const std::string& dump) {
  const geometry::DomainSpec d = domain_path.empty() ? geometry::make_annulus(r, R) : geometry::load_domain(domain_path);
  const RobinPair robin{RobinParam::parse(hin), RobinParam::parse(hout)};
  const fem::Mesh mesh = fem::build_mesh(d, n_theta, n_radial);
  const fem::EigenResult eig = fem::solve(mesh, robin);
  std::cout << "h_in,h_out,n_theta,n_radial,nodes,lambda1\n"
            << robin.inner.to_string() << ',' << robin.outer.to_string() << ',' << n_theta << ',' << n_radial << ','
            << mesh.nodes.size() << ',' << num(eig.lambda1) << '\n';
  if (!dump.empty()) with_output(dump, [&](std::ostream& out) { fem::dump_field(out, mesh, eig.u); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification lab for the reverse Faber-Krahn inequality of the Robin Laplacian on doubly "
               "connected planar domains"};
  app.require_subcommand(1);

  std::string config, output_dir;
  unsigned workers = 0;
  bool no_plots = false;
  auto* verify = app.add_subcommand("verify", "Run an experiment suite and write results.csv, lemmas.csv and SVGs");
  verify->add_option("--config", config, "JSON experiment config (default suite when omitted)")->check(CLI::ExistingFile);
  verify->add_option("--output-dir", output_dir, "Directory for results (overrides the config)");
  verify->add_option("--workers", workers, "Parallel rows (0 = hardware threads)");
  verify->add_flag("--no-plots", no_plots, "Skip SVG output");

  double r = 1.0, R = 2.0;
  std::string hin = "1", hout = "1";
  auto* rad = app.add_subcommand("radial", "First eigenvalue of the annulus A_{r,R}; CSV on stdout");
  rad->add_option("--r", r, "Inner radius")->required();
  rad->add_option("--R", R, "Outer radius")->required();
  rad->add_option("--hin", hin, "Inner Robin parameter (number or inf)")->required();
  rad->add_option("--hout", hout, "Outer Robin parameter (number or inf)")->required();

  std::string domain, side = "inner", csv, plot_parallels;
  int resolution = 1024;
  auto* prof = app.add_subcommand("profile", "Parallel-set length profile s(delta); CSV on stdout");
  prof->add_option("--domain", domain, "Domain file")->required()->check(CLI::ExistingFile);
  prof->add_option("--side", side, "inner or outer")->check(CLI::IsMember({"inner", "outer"}));
  prof->add_option("--resolution", resolution, "Background grid cells along the longer side");
  prof->add_option("--csv", csv, "Write the profile here instead of stdout");
  prof->add_option("--plot-parallels", plot_parallels, "SVG of the level curves");

  int n_theta = 128, n_radial = 32, flow_resolution = 256;
  std::string labels, plot_flow;
  auto* fl = app.add_subcommand("flow", "Gradient-flow basin decomposition of the FEM eigenfunction");
  fl->add_option("--domain", domain, "Domain file")->required()->check(CLI::ExistingFile);
  fl->add_option("--hin", hin, "Inner Robin parameter")->required();
  fl->add_option("--hout", hout, "Outer Robin parameter")->required();
  fl->add_option("--n-theta", n_theta, "Mesh angular cells");
  fl->add_option("--n-radial", n_radial, "Mesh radial cells");
  fl->add_option("--resolution", flow_resolution, "Seed grid cells along the longer side");
  fl->add_option("--labels", labels, "CSV of seed labels");
  fl->add_option("--plot-flow", plot_flow, "SVG of basins and cut");

  std::string dump;
  auto* eig = app.add_subcommand("eig", "First FEM eigenvalue on a domain file or an annulus");
  eig->add_option("--domain", domain, "Domain file (annulus --r/--R when omitted)")->check(CLI::ExistingFile);
  eig->add_option("--r", r, "Annulus inner radius");
  eig->add_option("--R", R, "Annulus outer radius");
  eig->add_option("--hin", hin, "Inner Robin parameter")->required();
  eig->add_option("--hout", hout, "Outer Robin parameter")->required();
  eig->add_option("--n-theta", n_theta, "Mesh angular cells");
  eig->add_option("--n-radial", n_radial, "Mesh radial cells");
  eig->add_option("--dump-field", dump, "Write 'node x y u' and 'tri i j k' lines");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return run_verify(config, output_dir, workers, no_plots);
    if (*rad) return run_radial(r, R, hin, hout);
    if (*prof) return run_profile(domain, side, resolution, csv, plot_parallels);
    if (*fl) return run_flow(domain, hin, hout, n_theta, n_radial, flow_resolution, labels, plot_flow);
    if (*eig) return run_eig(domain, r, R, hin, hout, n_theta, n_radial, dump);
  } catch (const Error& e) {
    std::cerr << "rfk-lab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rfk-lab: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
