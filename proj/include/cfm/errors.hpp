#pragma once

#include <stdexcept>
#include <string>

namespace cfm {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input violates a documented precondition (bad digit, x outside [0,1), ...).
struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Growth-expression text could not be parsed. `position` is a byte offset
// into the original string, pointing at the offending token.
struct ExprParseError : Error {
  ExprParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

// An enumeration would exceed its leaf budget; the caller should switch to
// the spectral engine or shrink the request.
struct BudgetError : Error {
  explicit BudgetError(const std::string& msg) : Error(msg) {}
};

// The growth-rate branch (B=1 / finite / infinite) could not be resolved
// from finite-horizon estimates; the caller must pass an explicit branch.
struct BranchError : Error {
  explicit BranchError(const std::string& msg) : Error(msg) {}
};

}  // namespace cfm
