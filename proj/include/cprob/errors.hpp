#pragma once

#include <stdexcept>
#include <string>

namespace cprob {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The input is well formed but outside an operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Text input (rational, descriptor, table, map or store file) is malformed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A postcondition the mathematics guarantees failed to hold. Signals a bug,
/// never bad input.
class InternalInvariantViolation : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotAGroup : public DomainError {
 public:
  using DomainError::DomainError;
};

class OrderCapExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotAbelian : public DomainError {
 public:
  using DomainError::DomainError;
};

class PreconditionViolated : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidAction : public DomainError {
 public:
  using DomainError::DomainError;
};

class WitnessNotFound : public InternalInvariantViolation {
 public:
  using InternalInvariantViolation::InternalInvariantViolation;
};

class GapViolation : public InternalInvariantViolation {
 public:
  using InternalInvariantViolation::InternalInvariantViolation;
};

namespace detail {

inline void ensure(bool cond, const std::string& what) {
  if (!cond) throw InternalInvariantViolation(what);
}

}  // namespace detail
}  // namespace cprob
