#pragma once

#include <stdexcept>
#include <string>

namespace diffudict {

// Dimension mismatch between operands (vector lengths, shard heights, ...).
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Point lies outside the set where a closed form is valid, e.g. a dual
// variable outside the conjugate domain.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// The requested quantity has no closed-form recovery for this task.
class UnsupportedRecoveryError : public std::logic_error {
 public:
  explicit UnsupportedRecoveryError(const std::string& what) : std::logic_error(what) {}
};

// A text input could not be parsed; the message carries the line number.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative routine exhausted its budget without reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Bad experiment configuration (unknown keys, missing values, bad types).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace diffudict
