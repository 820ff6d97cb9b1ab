#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bornwalk {

enum class ErrorKind {
  ConfigInvalid,
  DimensionMismatch,
  NotHermitian,
  NonFiniteResult,
  DegenerateState,
  EigenFailure,
  NoActivePair,
  TooManyUnabsorbed,
  SolverFailure,
  SizeExceeded,
  DegenerateExpected,
};

std::string_view to_string(ErrorKind kind);

/// True for failures of a numerical procedure (as opposed to bad input).
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace bornwalk
