#ifndef RWOGG_ERROR_HPP
#define RWOGG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rwogg {

/// Malformed descriptor, unknown family, bad parameter combination.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A builder was asked for more states than the configured cap allows.
class StateCapExceeded : public std::length_error {
public:
  using std::length_error::length_error;
};

/// An operation's documented precondition does not hold.
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// An iterative method did not reach its tolerance within the iteration cap.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace rwogg

#endif
