#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kairosis {

enum class ErrorCode {
  EmptyStream,
  ProbabilityOutOfRange,
  TimestampOutOfWindow,
  InvalidParameter,
  NonPositiveAlpha,
  EmptyCounts,
  LengthMismatch,
  UnnormalizedWeights,
  NoForecastsYet,
  DegenerateBenchmark,
  EmptyWindow,
  UnresolvedQuestion,
  UnknownQuestion,
  InvalidSpec,
  MissingHeader,
  ParseError,
  DuplicateQuestionId,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Coarse grouping used by the command-line tool to pick an exit status.
enum class ErrorCategory { Domain, Parse, Io };

ErrorCategory category(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace kairosis
