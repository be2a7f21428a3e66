#pragma once

#include <stdexcept>
#include <string>

namespace screensearch {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document; the message names the offending path.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input is well-formed but violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace screensearch
