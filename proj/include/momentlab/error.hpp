#pragma once

#include <stdexcept>
#include <string>

namespace momentlab {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition or usage violation (bad weight, table too short, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A mathematical validator found a counterexample. Carries the witness index.
class ValidationFailure : public Error {
 public:
  ValidationFailure(const std::string& what, unsigned long long witness)
      : Error(what), witness_(witness) {}
  unsigned long long witness() const noexcept { return witness_; }

 private:
  unsigned long long witness_;
};

// Internal invariant broken; indicates a bug rather than bad input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Malformed or mismatched coefficient cache file.
class CacheError : public Error {
 public:
  using Error::Error;
};

}  // namespace momentlab
