#include "bornwalk/error.hpp"

namespace bornwalk {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NonFiniteResult: return "NonFiniteResult";
    case ErrorKind::DegenerateState: return "DegenerateState";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::NoActivePair: return "NoActivePair";
    case ErrorKind::TooManyUnabsorbed: return "TooManyUnabsorbed";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::SizeExceeded: return "SizeExceeded";
    case ErrorKind::DegenerateExpected: return "DegenerateExpected";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFiniteResult:
    case ErrorKind::DegenerateState:
    case ErrorKind::EigenFailure:
    case ErrorKind::NoActivePair:
    case ErrorKind::TooManyUnabsorbed:
    case ErrorKind::SolverFailure:
    case ErrorKind::SizeExceeded:
    case ErrorKind::DegenerateExpected:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

}  // namespace bornwalk
