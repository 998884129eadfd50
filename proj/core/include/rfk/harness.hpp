#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rfk/geometry.hpp"
#include "rfk/robin.hpp"

namespace rfk::harness {

using geometry::DomainSpec;
using geometry::Point;

/// Curve rho(theta) = radius + sum_k (cos_k cos k theta + sin_k sin k theta) about `center`.
struct CurveTemplate {
  Point center;
  double radius = 1.0;
  std::vector<double> cos_coeffs;  // k = 1, 2, ...
  std::vector<double> sin_coeffs;
};

struct DeficitMatchedSpec {
  CurveTemplate inner;
  /// Outer base curve; its perturbation coefficients are scaled by the amplitude factor t.
  CurveTemplate outer;
  /// Largest admissible t.
  double amplitude_cap = 1.0;
  std::size_t samples = geometry::kDefaultSamples;
};

/// Scales the outer perturbation by t in [0, amplitude_cap] (bisection) until the isoperimetric
/// deficits of the two polylines agree, which is |dOut|^2 - |dIn|^2 = 4 pi |Omega|. Throws
/// Error(GenerationFailure) when the cap cannot reach the inner deficit. Pairs already matched to
/// within the polygon error of a circle keep t = 0.
DomainSpec generate_deficit_matched(const DeficitMatchedSpec& spec);

enum class FamilyKind { Concentric, Eccentric, FourierPerturbed, DeficitMatchedPair };

const char* to_string(FamilyKind kind);

struct FamilySpec {
  FamilyKind kind = FamilyKind::Concentric;
  std::string id;
  int count = 1;
  std::uint64_t seed = 1;
  double r = 1.0;
  double R = 2.0;
  /// Hole centre offset drawn uniformly from [offset_min, offset_max] in a random direction.
  double offset_min = 0.0;
  double offset_max = 0.0;
  /// Fourier modes with coefficient magnitudes drawn from [amplitude_min, amplitude_max] (relative
  /// to the base radius), random sign and phase.
  std::vector<int> inner_modes;
  double inner_amplitude_min = 0.0;
  double inner_amplitude_max = 0.0;
  std::vector<int> outer_modes;
  double outer_amplitude_min = 0.0;
  double outer_amplitude_max = 0.0;
  /// Deficit-matched pairs: the outer pattern is rescaled up to this cap (relative to R).
  double amplitude_cap = 0.3;
  std::vector<RobinPair> regimes;
};

struct GeneratedDomain {
  std::string id;
  FamilyKind family = FamilyKind::Concentric;
  DomainSpec domain;
  std::vector<RobinPair> regimes;
};

/// Deterministic in (spec, seed).
std::vector<GeneratedDomain> generate_family(const FamilySpec& spec, std::size_t samples = geometry::kDefaultSamples);

struct ExperimentConfig {
  std::vector<FamilySpec> families;
  /// Coarse FEM level; the second level doubles both counts.
  int n_theta = 128;
  int n_radial = 32;
  int profile_resolution = 512;
  int flow_resolution = 128;
  std::size_t boundary_samples = geometry::kDefaultSamples;
  double eps_chain = 0.02;
  bool run_parallels = true;
  bool run_flow = true;
  bool recheck_failures = true;
  bool plots = true;
  /// Empty: nothing is written.
  std::string output_dir;
  unsigned workers = 0;
};

/// Throws Error(InvalidArgument) for h_in * h_out < 0, (0, 0), empty families or unsupported
/// resolutions.
void validate(const ExperimentConfig& config);

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Concentric over every covered sign cell, eccentric and Fourier-perturbed families over the
/// one-sided regimes, deficit-matched pairs over the two-sided ones; two domains per family.
ExperimentConfig default_config();
/// Regimes with h_in * h_out >= 0 and (h_in, h_out) != (0, 0), one per covered sign cell.
std::vector<RobinPair> covered_regimes();

enum class Status { Pass, Fail, Inconclusive, Error };

const char* to_string(Status s);

struct VerificationRow {
  std::string domain_id;
  FamilyKind family = FamilyKind::Concentric;
  RobinPair robin;
  double r = 0.0;
  double R = 0.0;
  double lambda_coarse = 0.0;
  double lambda_domain = 0.0;
  double lambda_annulus = 0.0;
  std::optional<double> quotient;
  bool sandwich_ok = true;
  /// lambda_annulus - lambda_domain.
  double margin = 0.0;
  /// margin / max(|lambda_annulus|, 1e-12).
  double relative_margin = 0.0;
  /// Refinement did not push the margin toward a violation, or it shrank |margin|.
  bool trend_monotone = true;
  Status status = Status::Error;
  /// The row was re-run at doubled resolution after a first FAIL.
  bool rechecked = false;
  int n_theta = 0;
  int n_radial = 0;
  std::string note;
};

struct LemmaResult {
  std::string domain_id;
  RobinPair robin;
  std::string property;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteResult {
  std::vector<VerificationRow> rows;
  std::vector<LemmaResult> lemmas;

  int count(Status s) const;
  /// True iff a FAIL survived the doubled-resolution re-check.
  bool any_failure() const { return count(Status::Fail) > 0; }
};

struct RowResult {
  VerificationRow row;
  std::vector<LemmaResult> lemmas;
};

/// One (domain, regime) evaluation at `scale` times the configured resolutions. Failures are
/// recorded in the row, never thrown.
RowResult evaluate_row(const GeneratedDomain& domain, const RobinPair& robin, const ExperimentConfig& config,
                       int scale = 1);

/// Rows run as parallel tasks; files (results.csv, lemmas.csv, SVGs) are written afterwards.
SuiteResult run_rfk_suite(const ExperimentConfig& config);

void write_results_csv(std::ostream& out, const std::vector<VerificationRow>& rows);
void write_lemmas_csv(std::ostream& out, const std::vector<LemmaResult>& lemmas);

}  // namespace rfk::harness
