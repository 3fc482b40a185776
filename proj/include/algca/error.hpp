#pragma once

#include <stdexcept>
#include <string>

namespace algca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different alphabets or have incompatible shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its configured size cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// A spec file violates the documented schema. The message carries the field path.
class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace algca
