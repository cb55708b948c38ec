#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pilotwave {

/// Failure categories raised by the library. Every throw site uses one of
/// these so callers (and the CLI exit-code mapping) can branch on the kind.
enum class ErrorKind {
  InvalidArgument,
  GridTooNarrow,
  ZeroNorm,
  GridMismatch,
  OutOfDomain,
  TooFewSamples,
  UnsupportedState,
  TooLarge,
  EmptyEnsemble,
  DomainError,
  Nonconvergence,
  BoundaryLeak,
  ConditionViolation,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace pilotwave
