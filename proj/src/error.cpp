#include "wrbf/error.hpp"

#include <atomic>
#include <iostream>

namespace wrbf {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::out_of_range: return "out of range";
    case ErrorCode::factorization_failed: return "factorization failed";
    case ErrorCode::not_converged: return "not converged";
    case ErrorCode::numerical: return "numerical error";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::internal: return "internal error";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

FactorizationError::FactorizationError(const std::string& what, double smallest_pivot)
    : Error(ErrorCode::factorization_failed, what), smallest_pivot_(smallest_pivot) {}

ConvergenceError::ConvergenceError(const std::string& what, double best_gap)
    : Error(ErrorCode::not_converged, what), best_gap_(best_gap) {}

NumericalError::NumericalError(const std::string& what, long step)
    : Error(ErrorCode::numerical, what), step_(step) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

namespace {

void stderr_handler(const std::string& message) { std::cerr << "wrbf: warning: " << message << '\n'; }

std::atomic<WarningHandler> g_warning_handler{&stderr_handler};

}  // namespace

void set_warning_handler(WarningHandler handler) noexcept {
  g_warning_handler.store(handler ? handler : &stderr_handler);
}

void warn(const std::string& message) { g_warning_handler.load()(message); }

}  // namespace wrbf
