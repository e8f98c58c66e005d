#pragma once

#include <stdexcept>
#include <string>

namespace qexcl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A PSD argument had an eigenvalue below the negative support tolerance.
class NegativeEigenvalue : public Error {
 public:
  using Error::Error;
};

class InvalidAlpha : public Error {
 public:
  using Error::Error;
};

class ZeroOperator : public Error {
 public:
  using Error::Error;
};

/// Measurement effect outside 0 <= Lambda <= I.
class InvalidEffect : public Error {
 public:
  using Error::Error;
};

/// n-copy problem would exceed the configured Hilbert-space dimension cap.
class DimensionCap : public Error {
 public:
  using Error::Error;
};

/// A value violated a domain invariant (state, POVM, channel, ensemble, file).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qexcl
