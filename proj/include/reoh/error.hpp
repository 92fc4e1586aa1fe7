#pragma once

#include <stdexcept>
#include <string>

namespace reoh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition or invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the location when one is known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

/// Regression or EM could not produce an estimate.
class EstimatorError : public Error {
public:
    using Error::Error;
};

/// A measurement backend failed to run a configuration.
class BackendError : public Error {
public:
    using Error::Error;
};

} // namespace reoh
