#pragma once

#include <stdexcept>
#include <string>

namespace oswec {

/// Bad arguments or configuration. The CLI maps this to exit code 1.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Messages carry the file position.
class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Divergence, non-convergence or a singular solve. Exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oswec
