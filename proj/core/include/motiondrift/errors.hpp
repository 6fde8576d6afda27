#pragma once

#include <stdexcept>
#include <string>

namespace motiondrift {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclasses onto its exit-status contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown or inconsistent configuration (exit status 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed data handed to an operation (exit status 2).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// File access, parse, or format failures (exit status 2).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Training diverged or produced non-finite values (exit status 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace motiondrift
