#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace confloc {

enum class ErrorKind {
  IoFailure,
  ConfigMismatch,
  CorruptStore,
  VersionMismatch,
  MalformedConfig,
  DuplicateProperty,
  EmptySegment,
  InvalidRequest,
  RateLimited,
  NetworkFailure,
  AuthFailure,
  MissingFixture,
  UniverseTooSmall,
  EmptyDenominator,
  NotApplicable,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit status for an error surfaced by the CLI (always >= 64).
int exit_code_for(ErrorKind kind);

}  // namespace confloc
