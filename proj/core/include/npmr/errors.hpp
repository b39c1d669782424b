#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace npmr {

// Caller passed something that violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative routine failed (SVD non-convergence, step-size collapse).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, std::size_t iterations = 0)
        : std::runtime_error(what), iterations_(iterations) {}

    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
};

// Input file could not be opened.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Header/schema mismatch or an unparseable row. line() is 1-based, 0 if
// the error is not tied to a line.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace npmr
