#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wqed {

enum class ErrorCode {
  OutOfRange,
  NonFinite,
  SingularComposition,
  NumericalFailure,
  DivisionByZeroFlux,
  NoContrast,
  BracketingFailure,
  GridTooCoarse,
  NoTransmission,
  QuadratureNotConverged,
  GridMismatch,
  NonFiniteObjective,
  InvalidDataset,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for errors caused by bad user input rather than numerics or I/O.
  bool is_validation() const noexcept;

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace wqed
