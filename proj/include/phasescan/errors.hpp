#pragma once

// Error taxonomy shared by all modules.  Everything is an exception: the
// library never renormalizes or papers over a numerical problem silently.

#include <stdexcept>
#include <string>

namespace phasescan {

// Base class so callers can catch anything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probability/state mass lost to a finite cutoff exceeded the allowed budget,
// or a truncated series could not be bounded to tolerance.
class TruncationError : public Error {
 public:
  using Error::Error;
};

// Operands built at different cutoffs were combined.  Use embedded() to move
// a state to a larger space explicitly.
class CutoffMismatch : public Error {
 public:
  using Error::Error;
};

// A quantity that must be (near-)physical came out wrong beyond round-off:
// negative probability, non-Hermitian input, NaN, ...
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// An integration grid does not cover the support of its integrand.
class SupportError : public TruncationError {
 public:
  using TruncationError::TruncationError;
};

// Bad configuration file or command-line arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace phasescan
