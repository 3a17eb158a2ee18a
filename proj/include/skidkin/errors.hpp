#pragma once

#include <stdexcept>
#include <string>

namespace skidkin {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A precondition on values was violated (non-finite input, empty set, ...).
struct InvalidInputError : Error {
  using Error::Error;
};

// Model parameter vector has wrong arity or violates its bounds box.
struct InvalidParameterError : Error {
  using Error::Error;
};

// Motion with |omega| ~ 0 has its ICR at infinity.
struct DegenerateMotionError : Error {
  using Error::Error;
};

// Malformed file content; message carries the offending line number.
struct ParseError : Error {
  using Error::Error;
};

// A log with no usable rows.
struct EmptyLogError : Error {
  using Error::Error;
};

// Command and pose logs do not overlap long enough to be aligned.
struct AlignmentError : Error {
  using Error::Error;
};

// Requested training on a model with no trainable parameters.
struct NothingToTrainError : Error {
  using Error::Error;
};

}  // namespace skidkin
