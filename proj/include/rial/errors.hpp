#pragma once

#include <stdexcept>
#include <string>

namespace rial {

// Bad command line or configuration.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable, malformed or unsuitable data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parse failure at a known line of the input (1-based).
class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Non-finite values or a solver that could not produce a usable result.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rial
