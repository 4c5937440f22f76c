#pragma once

#include <stdexcept>
#include <string>

namespace gaudin {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Physical parameters or quantum numbers outside the admissible domain.
class InvalidSpec : public Error {
public:
  using Error::Error;
};

/// Quantum numbers that are not sorted nondecreasing with the required lower bound.
class NotCanonical : public Error {
public:
  using Error::Error;
};

class LengthMismatch : public Error {
public:
  using Error::Error;
};

class UndefinedAtZero : public Error {
public:
  using Error::Error;
};

/// k_i +- k_j = 0 (or k_i = 0) where the raw arctan(c/x) form has a pole.
class DegenerateConfiguration : public Error {
public:
  using Error::Error;
};

class NoConvergence : public Error {
public:
  NoConvergence(const std::string& what, int iterations)
      : Error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

private:
  int iterations_;
};

class OracleStall : public Error {
public:
  using Error::Error;
};

/// An invariant guaranteed by the mathematics was violated at runtime.
class InternalError : public Error {
public:
  using Error::Error;
};

}  // namespace gaudin
