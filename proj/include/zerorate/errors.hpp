#pragma once

#include <stdexcept>
#include <string>

namespace zr {

// Raised when a caller breaks a documented precondition that is not a plain
// bad argument (e.g. merging providers whose zero-rating profiles differ).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised when an exhaustive search would exceed its enumeration guard.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zr
