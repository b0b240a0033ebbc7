#pragma once

#include <stdexcept>

namespace josephus {

// Raised when an argument lies outside an operation's domain (N too small,
// probability outside [0,1], parameters violating a feasibility inequality).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The exhaustive oracle refuses sizes whose path space is too large.
class EnumerationCapError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A process state was asked to do something its invariants forbid.
class InvalidStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace josephus
