#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace netgrab {

enum class ErrorKind {
  FileNotFound,
  DecodeError,
  IoError,
  InvalidParameter,
  DegenerateImage,
  EmptyMarkers,
  InconsistentSkeleton,
  DimensionMismatch,
  EmptyGraph,
  ParseError,
  ValidationError,
  FormatError,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Pipeline validation failure. Carries the offending stage index when the
/// problem is attributable to one stage.
class ValidationError : public Error {
 public:
  ValidationError(std::optional<std::size_t> stage, const std::string& message);

  std::optional<std::size_t> stage() const noexcept { return stage_; }
  /// Message without the "stage N: " prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::optional<std::size_t> stage_;
  std::string detail_;
};

/// Graph file parse failure at a 1-based line number.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace netgrab
