#pragma once

#include <stdexcept>
#include <string>

namespace simsig {

enum class ErrorKind {
  too_few_points,
  non_finite_value,
  degenerate_input,
  invalid_survival,
  invalid_config,
  invalid_calibration,
  count_overflow,
  malformed_input,
  file_not_found,
  internal,
};

/// Single exception type for the whole library; `kind()` lets callers
/// (notably the CLI) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::too_few_points: return "too_few_points";
    case ErrorKind::non_finite_value: return "non_finite_value";
    case ErrorKind::degenerate_input: return "degenerate_input";
    case ErrorKind::invalid_survival: return "invalid_survival";
    case ErrorKind::invalid_config: return "invalid_config";
    case ErrorKind::invalid_calibration: return "invalid_calibration";
    case ErrorKind::count_overflow: return "count_overflow";
    case ErrorKind::malformed_input: return "malformed_input";
    case ErrorKind::file_not_found: return "file_not_found";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

}  // namespace simsig
