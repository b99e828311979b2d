#include "tailwave/errors.hpp"

namespace tailwave {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InadmissibleAlpha: return "InadmissibleAlpha";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::Extrapolation: return "Extrapolation";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ResonantExponent: return "ResonantExponent";
    case ErrorCode::SlowConvergence: return "SlowConvergence";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::FitInvalid: return "FitInvalid";
    case ErrorCode::ResonanceDetected: return "ResonanceDetected";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::ModeUnstable: return "ModeUnstable";
    case ErrorCode::IndicialCollision: return "IndicialCollision";
    case ErrorCode::UnhandledResonantCase: return "UnhandledResonantCase";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::DegenerateLedger: return "DegenerateLedger";
    case ErrorCode::UnstableCFL: return "UnstableCFL";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ObserverMissing: return "ObserverMissing";
    case ErrorCode::BelowFloor: return "BelowFloor";
    case ErrorCode::NonMonotoneEnvelope: return "NonMonotoneEnvelope";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace tailwave
