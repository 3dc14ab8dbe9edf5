#pragma once

#include <stdexcept>
#include <string>

namespace floorplan {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad file record, invalid angle, bad config key).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Input is well formed but carries no usable signal (empty histogram, too few points).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Room mask is empty, so no room shape can be extracted.
class NoRoomError : public Error {
 public:
  using Error::Error;
};

}  // namespace floorplan
