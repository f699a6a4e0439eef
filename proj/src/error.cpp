#include "phhinf/error.hpp"

namespace phhinf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kIndefiniteMatrix: return "IndefiniteMatrix";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kSingularResolvent: return "SingularResolvent";
    case ErrorCode::kNotPassivatable: return "NotPassivatable";
    case ErrorCode::kSpectrumClash: return "SpectrumClash";
    case ErrorCode::kImaginaryAxisEigenvalue: return "ImaginaryAxisEigenvalue";
    case ErrorCode::kSubspaceNotGraph: return "SubspaceNotGraph";
    case ErrorCode::kResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::kGramMismatch: return "GramMismatch";
    case ErrorCode::kDissipationViolated: return "DissipationViolated";
    case ErrorCode::kRankDeficientB: return "RankDeficientB";
    case ErrorCode::kNotAsymptoticallyStable: return "NotAsymptoticallyStable";
    case ErrorCode::kOrderingViolated: return "OrderingViolated";
    case ErrorCode::kSpectralRadiusTooLarge: return "SpectralRadiusTooLarge";
    case ErrorCode::kPhVerificationFailed: return "PhVerificationFailed";
    case ErrorCode::kIndefiniteV1: return "IndefiniteV1";
    case ErrorCode::kNoSolutionX: return "NoSolutionX";
    case ErrorCode::kUnstableSystem: return "UnstableSystem";
    case ErrorCode::kNearSingularGramian: return "NearSingularGramian";
    case ErrorCode::kInadmissibleP: return "InadmissibleP";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace phhinf
