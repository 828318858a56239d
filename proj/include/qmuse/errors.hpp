#pragma once

#include <stdexcept>
#include <string>

namespace qmuse {

// Invalid-argument conditions use std::invalid_argument directly; the types
// below cover the remaining failure classes callers need to tell apart.

/// Unknown parameter keys, malformed config files, bad dictionaries.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A transition row with no probability mass.
class DegenerateStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Connection refused, timeouts, truncated responses.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The server answered with an error line.
class RemoteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qmuse
