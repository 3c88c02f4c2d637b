// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flucast {

enum class ErrorCode {
  // input / data problems
  MalformedRow,
  DuplicateCell,
  EmptyPanel,
  RangeOutOfBounds,
  FormatVersionMismatch,
  CorruptPayload,
  UnknownCountry,
  InsufficientHistory,
  MissingDataInScope,
  DimensionMismatch,
  EmptySplit,
  ShapeMismatch,
  NonFiniteInput,
  MissingFeatureColumn,
  SchemaMismatch,
  AllPointsSkipped,
  InvalidScenario,
  InvalidConfig,
  Io,
  // training problems
  DivergedTraining,
  InsufficientData,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorCategory { Data, Training };

ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// what() without the code prefix; use when re-throwing with more context.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace flucast
