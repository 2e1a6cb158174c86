#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uvman {

// Base type for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operands do not share (vars, order).
struct ShapeMismatch : Error {
  using Error::Error;
};

// log/sqrt/pow applied outside the domain of its constant term,
// or scalar evaluation outside a builtin's domain.
struct DomainError : Error {
  using Error::Error;
};

// Division by a jet whose constant term vanishes.
struct SingularDivision : Error {
  using Error::Error;
};

// The jet does not retain enough valid degrees for the operation.
struct InsufficientOrder : Error {
  using Error::Error;
};

// Jet-valued linear solve hit a pivot with (near-)zero constant term.
struct SingularMatrix : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  using Error::Error;
};

// Expression evaluation failure, annotated with the offending subexpression.
struct EvalError : Error {
  using Error::Error;
};

// Malformed run configuration.
struct ConfigError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;  // 1-based offset into the formula text
};

}  // namespace uvman
