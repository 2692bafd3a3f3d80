#include "netgrab/error.hpp"

namespace netgrab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DegenerateImage: return "DegenerateImage";
    case ErrorKind::EmptyMarkers: return "EmptyMarkers";
    case ErrorKind::InconsistentSkeleton: return "InconsistentSkeleton";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyGraph: return "EmptyGraph";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::FormatError: return "FormatError";
  }
  return "Unknown";
}

namespace {

std::string stage_prefix(std::optional<std::size_t> stage) {
  return stage ? "stage " + std::to_string(*stage) + ": " : std::string{};
}

}  // namespace

ValidationError::ValidationError(std::optional<std::size_t> stage, const std::string& message)
    : Error(ErrorKind::ValidationError, stage_prefix(stage) + message),
      stage_(stage),
      detail_(message) {}

FormatError::FormatError(std::size_t line, const std::string& message)
    : Error(ErrorKind::FormatError, "line " + std::to_string(line) + ": " + message),
      line_(line) {}

}  // namespace netgrab
