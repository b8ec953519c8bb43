#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ratdyn {

enum class ErrorCode {
  DegenerateMap,
  DegreeTooLow,
  DegreeCapExceeded,
  RootFindingFailed,
  InexactDivision,
  OrbitMismatch,
  NotACycle,
  CommonRootAtPole,
  NotRationalCoefficients,
  SingularCurve,
  NotRepelling,
  InPostcriticalSet,
  NoReturnFound,
  NewtonDiverged,
  PeriodCollision,
  InvalidArgument,
  ParseError,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegenerateMap: return "DegenerateMap";
    case ErrorCode::DegreeTooLow: return "DegreeTooLow";
    case ErrorCode::DegreeCapExceeded: return "DegreeCapExceeded";
    case ErrorCode::RootFindingFailed: return "RootFindingFailed";
    case ErrorCode::InexactDivision: return "InexactDivision";
    case ErrorCode::OrbitMismatch: return "OrbitMismatch";
    case ErrorCode::NotACycle: return "NotACycle";
    case ErrorCode::CommonRootAtPole: return "CommonRootAtPole";
    case ErrorCode::NotRationalCoefficients: return "NotRationalCoefficients";
    case ErrorCode::SingularCurve: return "SingularCurve";
    case ErrorCode::NotRepelling: return "NotRepelling";
    case ErrorCode::InPostcriticalSet: return "InPostcriticalSet";
    case ErrorCode::NoReturnFound: return "NoReturnFound";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::PeriodCollision: return "PeriodCollision";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a
/// machine-readable code next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ratdyn
