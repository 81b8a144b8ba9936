#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riscore {

enum class ErrorCode {
  // corpus
  MissingFile,
  MalformedLine,
  InvariantViolation,
  // embedder
  EndpointUnavailable,
  DimensionMismatch,
  ZeroVector,
  MissingEmbedding,
  // llm_gateway
  AuthFailure,
  RequestRejected,
  ResponseTruncated,
  UnknownModelTag,
  // reconstructor
  ExemplarOverlap,
  Unparseable,
  // distractor_forge
  InsufficientDistractors,
  UnknownLabel,
  MalformedIndexLine,
  MalformedDataRecord,
  DanglingPointer,
  // assembler
  TooFewDistractors,
  DuplicateOption,
  // prompter
  MissingExplanation,
  ShotMismatch,
  OptionCountMismatch,
  PairingMismatch,
  // evaluator
  IncompleteGroup,
  UnknownRiddle,
  // cli / general
  InvalidArgument,
  Config,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace riscore
