#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qubus {

/// Raised when an input violates a documented invariant (trace, Hermiticity,
/// positivity, range of a physical parameter, register bounds).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the sequence-file reader; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Raised by numerical routines that cannot meet their accuracy contract
/// (step-size underflow, Fock truncation leak).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qubus
