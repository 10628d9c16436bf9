#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace melseg {

enum class ErrorCode {
  // corpus
  MalformedHeader,
  NonIntegerField,
  NonMonotoneOnset,
  OverlappingNotes,
  EmptyMelody,
  FirstNoteNotPhraseStart,
  InvalidNote,
  EmptyCorpus,
  DuplicateId,
  // numerics / models
  DimensionMismatch,
  TooLargeForEnumeration,
  EmptyFreeSet,
  EmptyStream,
  NonFiniteGradient,
  NonFiniteLoss,
  NonPositiveProbability,
  NonPositiveBeta,
  ConfigMismatch,
  EmptyInput,
  EmptyBsp,
  EmptyKSet,
  EmptyTrainingSet,
  LengthMismatch,
  FoldTooSmall,
  InvalidSpec,
  InvalidConfig,
  // io
  IoError,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this one exception type; callers
// that care about the cause switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the leading code name.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace melseg
