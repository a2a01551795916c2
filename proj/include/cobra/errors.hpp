#pragma once

#include <stdexcept>
#include <string>

namespace cobra {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the operation's domain (unknown variable, bad permutation, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid formula or game definition.
class DefinitionError : public Error {
 public:
  using Error::Error;
};

// The model enumeration hit the configured cap.
class ModelCapExceeded : public Error {
 public:
  using Error::Error;
};

// An experiment produced zero or several true outcomes for a code.
class IllFormedGameError : public Error {
 public:
  using Error::Error;
};

class MalformedTreeError : public Error {
 public:
  using Error::Error;
};

// A strategy kept choosing experiments past the depth cap.
class NonTerminatingStrategy : public Error {
 public:
  using Error::Error;
};

// A ranking function divided by a zero model total.
class UndefinedRankError : public Error {
 public:
  using Error::Error;
};

}  // namespace cobra
