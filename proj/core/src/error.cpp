#include "wqed/error.hpp"

namespace wqed {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SingularComposition: return "SingularComposition";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::DivisionByZeroFlux: return "DivisionByZeroFlux";
    case ErrorCode::NoContrast: return "NoContrast";
    case ErrorCode::BracketingFailure: return "BracketingFailure";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NoTransmission: return "NoTransmission";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::InvalidDataset: return "InvalidDataset";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool Error::is_validation() const noexcept {
  switch (code_) {
    case ErrorCode::OutOfRange:
    case ErrorCode::NonFinite:
    case ErrorCode::GridTooCoarse:
    case ErrorCode::GridMismatch:
    case ErrorCode::InvalidDataset:
      return true;
    default:
      return false;
  }
}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace wqed
