#pragma once

#include <stdexcept>
#include <string>

namespace hmsort {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input: a file line, a config value, a scenario event.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A precondition or invariant of a public contract was violated.
class ContractError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Innovation covariance could not be factorized.
class DegenerateCovariance : public Error {
public:
    using Error::Error;
};

}  // namespace hmsort
