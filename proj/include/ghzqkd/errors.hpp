#pragma once

#include <stdexcept>
#include <string>

namespace ghzqkd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A state handed to an operation that requires a unit vector was not one.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// An expectation value came back with a non-negligible imaginary part.
class ImaginaryResidue : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

/// Invalid protocol or command-line configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Method 1 ran out of rounds before enough rounds were retained.
class KeyExhausted : public Error {
 public:
  using Error::Error;
};

class NoRetainedRounds : public Error {
 public:
  using Error::Error;
};

class EnumerationInfeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace ghzqkd
