#pragma once

#include <stdexcept>
#include <string>

namespace rbal {

// Caller passed arguments that break a documented precondition
// (dimension mismatch, out-of-range index, invalid probability vector).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Training data cannot support a model (e.g. only one class present).
class DegenerateTraining : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear system could not be factorized even after jitter.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; message carries the row number when known.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment, generator or decision-process configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rbal
