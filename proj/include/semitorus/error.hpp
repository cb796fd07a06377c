#pragma once

#include <stdexcept>
#include <string>

namespace semitorus {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  PrecisionExhausted,
  InsufficientElements,
  InvarianceViolation,
  UnsupportedCombination,
  NotFound,
  ConstructionViolation,
  ResourceLimit,
};

const char* to_string(ErrorKind kind);

/// Base exception for every library failure. The kind lets the CLI map
/// failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace semitorus
