#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pjinv {

enum class ErrorKind {
  invalid_input,
  domain,
  evaluation,
  syntax,
  unknown_identifier,
  arity_mismatch,
  not_regular,
  local_solve_failure,
  non_convergence,
  not_certified,
  usage,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::domain: return "domain";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::unknown_identifier: return "unknown-identifier";
    case ErrorKind::arity_mismatch: return "arity-mismatch";
    case ErrorKind::not_regular: return "not-regular";
    case ErrorKind::local_solve_failure: return "local-solve-failure";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::not_certified: return "not-certified";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

/// Base exception for every failure raised by the toolkit.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace pjinv
