#pragma once

#include <stdexcept>
#include <string>

namespace lcarena {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid values, broken invariants, malformed configs or data files.
class ValidationError : public Error {
  using Error::Error;
};

// Filesystem or serialization failure; the message carries the path.
class IoError : public Error {
  using Error::Error;
};

// Misuse of the episode protocol: wrong round, acting on a finished
// episode, off-grid actions, suggest() before meta_train().
class ProtocolError : public Error {
  using Error::Error;
};

// A transcript or artifact failed a hash / consistency check.
class IntegrityError : public Error {
  using Error::Error;
};

}  // namespace lcarena
