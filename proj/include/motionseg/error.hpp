// Error types shared by every motionseg module.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace motionseg {

enum class ErrorCode {
  kInvalidArgument,
  kNonUnitQuaternion,
  kEmptySeries,
  kEmptyObservations,
  kDegenerateWeights,
  kSeriesTooShort,
  kSeriesTooLong,
  kDegenerateInput,
  kBadRange,
  kWrongExampleCount,
  kMissingExamplesForApproach,
  kNoSegmentsFound,
  kUnknownLabel,
  kMalformedRange,
  kOverlapError,
  kTransportError,
  kParseError,
  kEmptyEvalSet,
  kFormatError,
  kIoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonUnitQuaternion: return "NonUnitQuaternion";
    case ErrorCode::kEmptySeries: return "EmptySeries";
    case ErrorCode::kEmptyObservations: return "EmptyObservations";
    case ErrorCode::kDegenerateWeights: return "DegenerateWeights";
    case ErrorCode::kSeriesTooShort: return "SeriesTooShort";
    case ErrorCode::kSeriesTooLong: return "SeriesTooLong";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kBadRange: return "BadRange";
    case ErrorCode::kWrongExampleCount: return "WrongExampleCount";
    case ErrorCode::kMissingExamplesForApproach: return "MissingExamplesForApproach";
    case ErrorCode::kNoSegmentsFound: return "NoSegmentsFound";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kMalformedRange: return "MalformedRange";
    case ErrorCode::kOverlapError: return "OverlapError";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyEvalSet: return "EmptyEvalSet";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

/// Base exception; `code()` identifies the failure class so callers can
/// branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Chat endpoint failure. Transient failures (connection loss, 429, 5xx)
/// are eligible for retry.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, bool transient)
      : Error(ErrorCode::kTransportError, message), transient_(transient) {}

  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

/// Model reply that could not be parsed into segments. Keeps the raw text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string raw_reply, ErrorCode cause)
      : Error(ErrorCode::kParseError, message), raw_reply_(std::move(raw_reply)), cause_(cause) {}

  const std::string& raw_reply() const noexcept { return raw_reply_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::string raw_reply_;
  ErrorCode cause_;
};

/// Malformed input file; carries the 1-based line number when known.
class FormatError : public Error {
 public:
  FormatError(const std::string& source, std::size_t line, const std::string& message)
      : Error(ErrorCode::kFormatError,
              source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace motionseg
