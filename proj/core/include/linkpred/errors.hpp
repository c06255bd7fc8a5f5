#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linkpred {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Katz iteration blew up; alpha is too large for the graph's spectral radius.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace linkpred
