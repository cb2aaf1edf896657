#pragma once

#include <stdexcept>
#include <string>

namespace zk {

// Invalid physical or numerical parameters (bad domain sizes, weights out of range, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed external data: config files, snapshot files, CSV.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation was called in a way its contract forbids.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative procedure failed to reach its tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// The time integration left the stable regime (guard violation, NaN state).
struct InstabilityError : std::runtime_error {
  explicit InstabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace zk
