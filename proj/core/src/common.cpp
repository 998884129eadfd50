#include <charconv>
#include <cmath>
#include <string>

#include "rfk/error.hpp"
#include "rfk/robin.hpp"

namespace rfk {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDomain: return "invalid-domain";
    case ErrorCode::UnsupportedRegime: return "unsupported-regime";
    case ErrorCode::InfeasibleMatch: return "infeasible-match";
    case ErrorCode::IncompatibleDomain: return "incompatible-domain";
    case ErrorCode::NoEigenvalueFound: return "no-eigenvalue-found";
    case ErrorCode::Overflow: return "overflow";
    case ErrorCode::StructureViolation: return "structure-violation";
    case ErrorCode::MeshingFailure: return "meshing-failure";
    case ErrorCode::FactorizationFailure: return "factorization-failure";
    case ErrorCode::NotConverged: return "not-converged";
    case ErrorCode::InvalidTestFunction: return "invalid-test-function";
    case ErrorCode::DegenerateProfile: return "degenerate-profile";
    case ErrorCode::InconsistentInput: return "inconsistent-input";
    case ErrorCode::InvalidSeed: return "invalid-seed";
    case ErrorCode::DecompositionFailure: return "decomposition-failure";
    case ErrorCode::EmptyBasin: return "empty-basin";
    case ErrorCode::GenerationFailure: return "generation-failure";
    case ErrorCode::Parse: return "parse-error";
    case ErrorCode::InvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

std::string RobinParam::to_string() const {
  if (dirichlet_) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value_);
  return std::string(buf, res.ptr);
}

RobinParam RobinParam::parse(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (text == "inf" || text == "+inf" || text == "Inf" || text == "dirichlet") return dirichlet();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::Parse, "bad Robin parameter '" + std::string(text) + "'");
  }
  return finite(value);
}

}  // namespace rfk
