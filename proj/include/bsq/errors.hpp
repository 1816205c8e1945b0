#pragma once

#include <stdexcept>
#include <string>

namespace bsq {

/// Bad parameters or malformed inputs. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration or quadrature would exceed its work budget. Maps to exit code 2.
class BudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace bsq
