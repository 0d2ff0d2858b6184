#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace archmx {

enum class ErrorCode {
  LengthMismatch,
  DegenerateColumn,
  NonFiniteData,
  InvalidOrder,
  InvalidArgument,
  EmptyInput,
  CholeskyFailure,
  InvalidDf,
  DimensionMismatch,
  NonPositiveVolatility,
  Overflow,
  ZeroRowSum,
  SingularNormalEquations,
  OptimizerDiverged,
  DimensionTooHigh,
  WindowTooLarge,
  EvenWindow,
  MemoryGuard,
  TooShort,
  DegenerateResiduals,
  InvalidLevel,
  InvalidPValue,
  IndexOutOfRange,
  FileNotFound,
  MissingColumn,
  NonNumericCell,
  NonPositivePrice,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries exactly one ErrorCode.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace archmx
