#ifndef NEMATORUS_ERRORS_HPP
#define NEMATORUS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nematorus {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Aspect ratio outside the embedded-torus range (mu <= 1).
class InvalidRatio : public Error {
public:
  using Error::Error;
};

/// Non-positive elastic modulus.
class InvalidConstants : public Error {
public:
  using Error::Error;
};

/// Grid too coarse to unwrap a line field: an increment reduced mod pi
/// reached the +-pi/2 ambiguity band.
class AmbiguousJump : public Error {
public:
  using Error::Error;
};

/// Invalid grid dimensions or a field/grid mismatch.
class InvalidGrid : public Error {
public:
  using Error::Error;
};

/// Explicit time step made the discrete energy increase.
class StepUnstable : public Error {
public:
  using Error::Error;
};

/// Both ends of a bisection bracket fall into the same class.
class BracketInvalid : public Error {
public:
  using Error::Error;
};

/// Malformed configuration file or command-line value.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace nematorus

#endif
