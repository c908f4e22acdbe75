#pragma once

#include <stdexcept>
#include <string>

namespace tenx18 {

// Every library error derives from Error so callers (CLI, service) can map
// the concrete type onto an exit code or an HTTP status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class IllegalMove : public Error {
 public:
  using Error::Error;
};

class IncompleteGame : public Error {
 public:
  using Error::Error;
};

class NoMoves : public Error {
 public:
  using Error::Error;
};

// A computation would exceed a configured size budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace tenx18
