#pragma once

#include <stdexcept>
#include <string>

namespace symgap {

// Invalid arguments at construction time (negative weights, omega out of range, ...).
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation requested outside its supported regime (m too large, bad divisibility, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A value observed at evaluation time fell outside its required range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

}  // namespace symgap
