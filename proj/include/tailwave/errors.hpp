#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tailwave {

enum class ErrorCode {
  InadmissibleAlpha,
  InvalidModel,
  Extrapolation,
  StepFailure,
  NonFinite,
  ResonantExponent,
  SlowConvergence,
  GridMismatch,
  FitInvalid,
  ResonanceDetected,
  ResidualTooLarge,
  ModeUnstable,
  IndicialCollision,
  UnhandledResonantCase,
  Degenerate,
  DegenerateLedger,
  UnstableCFL,
  ConfigInvalid,
  ObserverMissing,
  BelowFloor,
  NonMonotoneEnvelope,
  DegenerateProfile,
  ConfigParse,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tailwave
