#pragma once

#include <stdexcept>
#include <string>

namespace robustkb {

/// Base of all library errors. Each subclass maps onto one CLI exit code.
class Error : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Invalid configuration or argument (exit code 2).
class ConfigError : public Error
{
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// R <= 0, NaN, or time-step underflow (exit code 3).
class NumericalError : public Error
{
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// A prior-stage artifact is missing (exit code 4).
class MissingInputError : public Error
{
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace robustkb
