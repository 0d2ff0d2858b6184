#include "archmx/error.hpp"

namespace archmx {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::InvalidDf: return "InvalidDf";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveVolatility: return "NonPositiveVolatility";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ZeroRowSum: return "ZeroRowSum";
    case ErrorCode::SingularNormalEquations: return "SingularNormalEquations";
    case ErrorCode::OptimizerDiverged: return "OptimizerDiverged";
    case ErrorCode::DimensionTooHigh: return "DimensionTooHigh";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::EvenWindow: return "EvenWindow";
    case ErrorCode::MemoryGuard: return "MemoryGuard";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::DegenerateResiduals: return "DegenerateResiduals";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::InvalidPValue: return "InvalidPValue";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace archmx
