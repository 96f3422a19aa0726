#pragma once

#include <stdexcept>
#include <string>

namespace cavspin {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad rate, even grid size, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain a special function is evaluated on.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A steady state or driven response was requested for a model that grows.
class UnstableModel : public Error {
 public:
  using Error::Error;
};

// Integrator, root finder or factorization did not meet its tolerance.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace cavspin
