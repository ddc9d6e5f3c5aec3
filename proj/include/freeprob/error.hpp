#pragma once

#include <stdexcept>
#include <string>

namespace freeprob {

// Invalid argument or parameter outside its domain (N <= lambda, s >= t, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Request exceeds a configured size limit (partition size, transform order).
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (mismatched ground sets, p not <= q).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Mesh refinement did not reach the requested tolerance within its budget.
class RefinementFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed external input: JSON documents, CLI values.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace freeprob
