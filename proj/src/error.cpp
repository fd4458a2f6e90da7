#include "lpqr/error.hpp"

namespace lpqr {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateColumn: return "DegenerateColumn";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::NonFiniteIterate: return "NonFiniteIterate";
    case ErrorKind::SvdFailure: return "SvdFailure";
    case ErrorKind::AllFitsFailed: return "AllFitsFailed";
    case ErrorKind::RankTooLarge: return "RankTooLarge";
    case ErrorKind::AllZeroSpectrum: return "AllZeroSpectrum";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnbalancedPanel: return "UnbalancedPanel";
    case ErrorKind::DuplicateCell: return "DuplicateCell";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace lpqr
