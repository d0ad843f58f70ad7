#pragma once

#include <stdexcept>
#include <string>

namespace psfest {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Frequency grid too small for a support or target window.
class SizingError : public Error {
 public:
  using Error::Error;
};

/// Blur kernel with no usable lattice mass.
class DegenerateKernelError : public Error {
 public:
  using Error::Error;
};

/// Zero divided by zero in a frequency-domain filter.
class DivisionError : public Error {
 public:
  using Error::Error;
};

/// Summation window does not cover the signal it is accounting for.
class AccountingError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced during a numerical computation.
class ComputeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ImageHeaderError : public Error {
 public:
  using Error::Error;
};

class ImageDepthError : public Error {
 public:
  using Error::Error;
};

class ImagePayloadError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace psfest
