#ifndef CGDIFF_ERRORS_H_
#define CGDIFF_ERRORS_H_

#include <stdexcept>
#include <string>

namespace cgdiff {

// Base of every error thrown by the library. The CLI maps these to exit
// code 2 (data error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed exchange / ground-truth / report document.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Document is well formed but violates a data-model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Two programs cannot be compared (different feature layouts).
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

// A mapping pair is outside the retained candidate set.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A mapping is not one-to-one.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// Exhaustive search refused because the instance is too large.
class RefusalError : public Error {
 public:
  using Error::Error;
};

// Ground-truth chain links do not share an id space.
class CompositionError : public Error {
 public:
  using Error::Error;
};

}  // namespace cgdiff

#endif  // CGDIFF_ERRORS_H_
