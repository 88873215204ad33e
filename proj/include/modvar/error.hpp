#pragma once

#include <stdexcept>
#include <string>

namespace modvar {

/// Failure categories surfaced by the library. The CLI prints the code
/// verbatim so callers can match on it.
enum class ErrorCode {
  invalid_argument,
  non_finite,
  incommensurate_grid,
  grid_too_small,
  grid_too_coarse,
  aliasing,
  bracket_failure,
  no_convergence,
  io,
  parse,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::incommensurate_grid: return "incommensurate_grid";
    case ErrorCode::grid_too_small: return "grid_too_small";
    case ErrorCode::grid_too_coarse: return "grid_too_coarse";
    case ErrorCode::aliasing: return "aliasing";
    case ErrorCode::bracket_failure: return "bracket_failure";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace modvar
