#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbi {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A value violates the invariants of its domain type.
class InvalidInput : public Error
{
public:
    using Error::Error;
};

class InvalidDataset : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

class InvalidDecomposition : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

class InvalidCoverage : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

/// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error
{
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The observation has zero likelihood under every admissible prior.
class ZeroEvidenceError : public Error
{
public:
    using Error::Error;
};

/// No grid-supported prior satisfies the constraint set.
class InfeasibleConstraints : public Error
{
public:
    using Error::Error;
};

class SamplingFailure : public Error
{
public:
    using Error::Error;
};

/// Exhaustive enumeration would exceed its combination budget.
class CombinatorialLimit : public Error
{
public:
    using Error::Error;
};

} // namespace cbi
