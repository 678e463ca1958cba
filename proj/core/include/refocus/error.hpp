#pragma once

#include <stdexcept>
#include <string>

namespace refocus {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a type invariant (empty cloud, non-finite coordinate).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An argument is out of its documented range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or does not follow its format. The message names
/// the file and, where applicable, the 1-based line.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A forward pass produced a non-finite activation.
class NumericOverflow : public Error {
 public:
  using Error::Error;
};

/// An influence map has no positive mass and cannot be normalized.
class DegenerateInfluence : public Error {
 public:
  using Error::Error;
};

/// A probability vector has a negative entry or does not sum to one.
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

/// Corruption error is undefined because the pivot made no mistakes on a family.
class UndefinedCorruptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace refocus
