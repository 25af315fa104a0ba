#pragma once

#include <stdexcept>
#include <string>

namespace cavitrap {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Laser frequency (or a drive frequency) sits on top of a transition/mode.
class ResonanceError : public Error {
 public:
  using Error::Error;
};

/// Out-of-plane curvature at the origin is non-positive.
class AntiTrappedError : public Error {
 public:
  using Error::Error;
};

/// Two ions closer than the minimum pair distance.
class SingularConfigurationError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace cavitrap
