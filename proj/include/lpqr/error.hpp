#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lpqr {

enum class ErrorKind {
  DegenerateColumn,
  DimensionMismatch,
  LengthMismatch,
  NonFiniteInput,
  NonFiniteIterate,
  SvdFailure,
  AllFitsFailed,
  RankTooLarge,
  AllZeroSpectrum,
  InvalidArgument,
  UnbalancedPanel,
  DuplicateCell,
  ParseError,
  EmptyFile,
  IoError,
};

/// Stable machine-readable name used by the CLI error line.
std::string_view error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lpqr
