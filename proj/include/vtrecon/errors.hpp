#pragma once

#include <stdexcept>
#include <string>

namespace vtrecon {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or precondition violation.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Degenerate or invalid geometry (zero area, disconnected edge graph, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Divergence, non-finite values or a singular linear system.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Bad session configuration (unknown key, malformed value, empty prior).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A tactile reading with no force and no torque.
class NoContactError : public Error {
 public:
  using Error::Error;
};

}  // namespace vtrecon
