#pragma once

#include <stdexcept>
#include <string>

namespace sketchbench {

/// Invalid argument or configuration value (CLI exit code 2).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not conform.
class ShapeError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Input outside the domain of a function, e.g. a hash key >= the field prime.
class DomainError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Malformed MatrixMarket input. The message names the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An iterative kernel failed to converge (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix that must have full rank does not (CLI exit code 4).
class RankError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A combinatorial check would exceed its enumeration budget (CLI exit code 4).
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sketchbench
