#pragma once

#include <stdexcept>
#include <string>

namespace scalenet {

/// Raised when a caller passes arguments outside an operation's domain.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an operation is invoked on an object in the wrong state.
class StateError : public std::logic_error {
 public:
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace scalenet
