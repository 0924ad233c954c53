#pragma once

#include <stdexcept>
#include <string>

namespace mtinsar {

enum class ErrorCode {
  EmptyCatalog,
  DisconnectedNetwork,
  DimensionMismatch,
  DegenerateInput,
  InfeasibleNetwork,
  InsufficientPixels,
  ConstantElevation,
  DegenerateGeometry,
  RankDeficient,
  InsufficientEpochs,
  NoPixelsNearStation,
  PixelOutsideGrid,
  EmptyProduct,
  IoFailure,
  InvalidConfig,
  InvalidArgument,
  Internal,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::DisconnectedNetwork: return "DisconnectedNetwork";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::InfeasibleNetwork: return "InfeasibleNetwork";
    case ErrorCode::InsufficientPixels: return "InsufficientPixels";
    case ErrorCode::ConstantElevation: return "ConstantElevation";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InsufficientEpochs: return "InsufficientEpochs";
    case ErrorCode::NoPixelsNearStation: return "NoPixelsNearStation";
    case ErrorCode::PixelOutsideGrid: return "PixelOutsideGrid";
    case ErrorCode::EmptyProduct: return "EmptyProduct";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

/// Library-wide exception. `code()` identifies the failure class so callers
/// (and the CLI exit-status mapping) can react without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for errors caused by bad user input (config, file contents),
  /// as opposed to runtime/numerical failures.
  bool is_validation() const noexcept {
    switch (code_) {
      case ErrorCode::EmptyCatalog:
      case ErrorCode::InvalidConfig:
      case ErrorCode::InvalidArgument:
      case ErrorCode::DimensionMismatch:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace mtinsar
