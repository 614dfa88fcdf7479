#pragma once

#include <stdexcept>
#include <string>

namespace cxshrink {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape of an argument does not match the operation's contract.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

// Input required to be Hermitian is not, beyond the stated tolerance.
class NotHermitian : public Error {
public:
  using Error::Error;
};

// Cholesky pivot or eigenvalue check failed for a matrix required to be
// positive definite.
class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

// An iterative routine hit its sweep cap before reaching tolerance.
class NoConvergence : public Error {
public:
  using Error::Error;
};

// Eigenvalue gaps fell below the guard used by gap-dividing formulas.
class DegenerateSpectrum : public Error {
public:
  using Error::Error;
};

// Operation invoked on the wrong side of the m vs p split, or m == p where a
// strict ordering is required.
class BranchMismatch : public Error {
public:
  using Error::Error;
};

// A conditionally required argument was not supplied.
class MissingArgument : public Error {
public:
  using Error::Error;
};

// A numeric probe or result came back NaN or infinite.
class NonFiniteResult : public Error {
public:
  using Error::Error;
};

// A user-supplied shrinkage coefficient profile violated its admissibility
// constraints at an evaluation point.
class ConstraintViolation : public Error {
public:
  using Error::Error;
};

// Configuration is syntactically valid but semantically unusable.
class ConfigInvalid : public Error {
public:
  using Error::Error;
};

// Configuration file could not be parsed; message names the offending field.
class ConfigParseError : public Error {
public:
  using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
public:
  using Error::Error;
};

// A sampled matrix was singular where the model guarantees full rank.
class DegenerateSample : public Error {
public:
  using Error::Error;
};

}  // namespace cxshrink
