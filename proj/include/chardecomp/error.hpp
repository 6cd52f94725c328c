#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chardecomp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A non-finite value appeared in a computation (NaN/Inf is never propagated).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed input text, optionally tied to a 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Feature schema, vocabulary or model architecture disagree.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Model container could not be read (bad magic, version, checksum, truncation).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Candidate enumeration would exceed the configured combinatorial cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace chardecomp
