#pragma once

#include <stdexcept>
#include <string>

namespace wrbf {

/// Failure categories; mirrored one-to-one by the C status codes.
enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch,
  out_of_range,
  factorization_failed,
  not_converged,
  numerical,
  io,
  internal,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Cholesky failed even at the largest jitter level.
class FactorizationError : public Error {
 public:
  FactorizationError(const std::string& what, double smallest_pivot);

  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

/// Frank-Wolfe stopped at its iteration limit before certifying the gap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_gap);

  double best_gap() const noexcept { return best_gap_; }

 private:
  double best_gap_;
};

/// A time step produced a non-finite nodal value.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, long step);

  long step() const noexcept { return step_; }

 private:
  long step_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

/// Receives diagnostics such as jitter use. Defaults to stderr.
using WarningHandler = void (*)(const std::string& message);

void set_warning_handler(WarningHandler handler) noexcept;
void warn(const std::string& message);

}  // namespace wrbf
