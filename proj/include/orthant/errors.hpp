#pragma once

#include <stdexcept>
#include <string>

namespace orthant {

// Every failure raised by the library derives from Error so callers that do
// not care about the category can catch a single type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation outside a model's admissible set (e.g. a zero Poisson rate with a
// positive count).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class DegenerateChainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace orthant
