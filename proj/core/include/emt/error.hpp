#pragma once

#include <stdexcept>
#include <string>

namespace emt {

/// Raised when caller-supplied data violates an operation's input contract
/// (dimension mismatch, non-finite value, out-of-range action).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation is invoked in a state it does not support,
/// e.g. evicting from an empty tree.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Dataset ingestion failures. The message names the file and, where it
/// applies, the offending line.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_same_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (expected " +
                       std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

}  // namespace detail
}  // namespace emt
