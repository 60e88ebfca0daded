#pragma once

#include <stdexcept>
#include <string>

namespace ringnc {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arrival rate reaches or exceeds the service rate of a node.
class UnstableNode : public Error {
 public:
  using Error::Error;
};

// Residual rate of a subpath is not positive for the relevant flow set.
class UnstableSubpath : public Error {
 public:
  using Error::Error;
};

class InvalidHopCount : public Error {
 public:
  using Error::Error;
};

class NotAnInterferer : public Error {
 public:
  using Error::Error;
};

class NotFeedforward : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class DegenerateRing : public Error {
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

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ringnc
