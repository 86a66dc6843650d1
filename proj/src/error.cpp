#include "confloc/error.hpp"

namespace confloc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::CorruptStore: return "CorruptStore";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::MalformedConfig: return "MalformedConfig";
    case ErrorKind::DuplicateProperty: return "DuplicateProperty";
    case ErrorKind::EmptySegment: return "EmptySegment";
    case ErrorKind::InvalidRequest: return "InvalidRequest";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::NetworkFailure: return "NetworkFailure";
    case ErrorKind::AuthFailure: return "AuthFailure";
    case ErrorKind::MissingFixture: return "MissingFixture";
    case ErrorKind::UniverseTooSmall: return "UniverseTooSmall";
    case ErrorKind::EmptyDenominator: return "EmptyDenominator";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) { return 64 + static_cast<int>(kind); }

}  // namespace confloc
