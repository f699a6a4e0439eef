#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phhinf {

enum class ErrorCode {
  kNonFinite,
  kDimensionMismatch,
  kInvalidArgument,
  kNonConvergence,
  kIndefiniteMatrix,
  kSingularMatrix,
  kSingularResolvent,
  kNotPassivatable,
  kSpectrumClash,
  kImaginaryAxisEigenvalue,
  kSubspaceNotGraph,
  kResidualTooLarge,
  kGramMismatch,
  kDissipationViolated,
  kRankDeficientB,
  kNotAsymptoticallyStable,
  kOrderingViolated,
  kSpectralRadiusTooLarge,
  kPhVerificationFailed,
  kIndefiniteV1,
  kNoSolutionX,
  kUnstableSystem,
  kNearSingularGramian,
  kInadmissibleP,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace phhinf
