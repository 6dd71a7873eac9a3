#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecggin {

enum class ErrorCode {
  ConstantSignal,
  NoPeaks,
  EmptySeries,
  SeriesTooShort,
  InvalidQ,
  ModeMismatch,
  InvalidPermutation,
  InvalidGraph,
  ShapeMismatch,
  EmptyGraph,
  EmptyCorpus,
  InvalidConfig,
  ParseError,
  LengthMismatch,
  RangeError,
  SingleClass,
  TooFewSamples,
  IoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures keep the 1-based row they refer to.
class RowError : public Error {
 public:
  RowError(ErrorCode code, std::size_t row, const std::string& what)
      : Error(code, "row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace ecggin
