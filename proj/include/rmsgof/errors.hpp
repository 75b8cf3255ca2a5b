#pragma once

#include <stdexcept>
#include <string>

namespace rmsgof {

enum class errc {
  parameter_out_of_domain,
  degenerate_probability,
  estimate_at_boundary,
  insufficient_data,
  truncation_overflow,
  rank_deficient_constraints,
  spectrum_anomaly,
  max_subdivision_exceeded,
  overflow_mass_too_large,
  unsupported_order,
  bad_input,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::parameter_out_of_domain: return "ParameterOutOfDomain";
    case errc::degenerate_probability: return "DegenerateProbability";
    case errc::estimate_at_boundary: return "EstimateAtBoundary";
    case errc::insufficient_data: return "InsufficientData";
    case errc::truncation_overflow: return "TruncationOverflow";
    case errc::rank_deficient_constraints: return "RankDeficientConstraints";
    case errc::spectrum_anomaly: return "SpectrumAnomaly";
    case errc::max_subdivision_exceeded: return "MaxSubdivisionExceeded";
    case errc::overflow_mass_too_large: return "OverflowMassTooLarge";
    case errc::unsupported_order: return "UnsupportedOrder";
    case errc::bad_input: return "BadInput";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

// Exit-code classes used by the CLI: data errors come from malformed or
// inadmissible input, numeric errors from the computation itself.
inline int exit_code_for(errc c) {
  switch (c) {
    case errc::insufficient_data:
    case errc::overflow_mass_too_large:
    case errc::bad_input:
      return 3;
    default:
      return 4;
  }
}

}  // namespace rmsgof
