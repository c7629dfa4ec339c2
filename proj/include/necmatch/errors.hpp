#pragma once

#include <stdexcept>
#include <string>

namespace necmatch {

/// Malformed arguments: bad indices, non-full matchings, schema violations.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A preference oracle or session client broke the next-best query protocol.
class ProtocolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A brute-force routine was asked to run outside its size guard.
class Refused : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Should never fire; raised when an invariant that is provable fails.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace necmatch
