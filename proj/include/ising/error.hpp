#pragma once

#include <stdexcept>
#include <string>

namespace ising {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRegion : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// A requested exact computation exceeds the configured size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Parameters fall outside the range where a bound or series is valid.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class InvalidFamily : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace ising
