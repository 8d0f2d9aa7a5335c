#pragma once

#include <stdexcept>
#include <string>

namespace fgd {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a formula (x <= c, negative power base, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Gamma evaluated at a non-positive integer.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Adaptive numerical procedure ran out of budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Invalid optimizer / experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fgd
