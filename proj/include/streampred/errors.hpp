#ifndef STREAMPRED_ERRORS_HPP
#define STREAMPRED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace streampred {

// Base of every error thrown by the library. Callers that only care about
// "something went wrong" catch this; the subclasses exist so the harness and
// the CLI can apply fallbacks or map to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class EmptySketch : public Error {
 public:
  using Error::Error;
};

class InvalidKernel : public Error {
 public:
  using Error::Error;
};

// SPD factorization failure, non-positive pivots, etc.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

// S4 <= S2^2 in the moment estimator.
class DegenerateMoments : public Error {
 public:
  using Error::Error;
};

// Zero denominator in the closed-form bias estimate.
class DegenerateBias : public Error {
 public:
  using Error::Error;
};

// beta** <= 0.
class InvalidPosterior : public Error {
 public:
  using Error::Error;
};

class ColdStart : public Error {
 public:
  using Error::Error;
};

class IngestionError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace streampred

#endif  // STREAMPRED_ERRORS_HPP
