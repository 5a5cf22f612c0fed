#pragma once

#include <stdexcept>
#include <string>

namespace causalfair {

// Base of every error thrown by the library. Callers that only care about
// "something went wrong with the input" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

class UnknownNodeError : public Error {
 public:
  using Error::Error;
};

class NotAdjacentError : public Error {
 public:
  using Error::Error;
};

class TooLargeError : public Error {
 public:
  using Error::Error;
};

class UnknownVariableError : public Error {
 public:
  using Error::Error;
};

class ZeroProbabilityEventError : public Error {
 public:
  using Error::Error;
};

class MissingRoleError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (edge list, CSV, JSON).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace causalfair
