#pragma once

#include <stdexcept>
#include <string>

namespace fracbilin {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config text could not be parsed (syntax, types, unknown keys).
struct ParseError : Error {
    using Error::Error;
};

// Parsed config violates a semantic constraint; message names the offending field.
struct ValidationError : Error {
    using Error::Error;
};

// A data function evaluated to NaN/Inf on the sampling grid.
struct NonFiniteSample : Error {
    using Error::Error;
};

// Parameter outside the admissible mathematical range (e.g. exponent not in (0,1)).
struct DomainError : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// A time-step matrix failed to solve to the required residual; the message
// names the step.  Usually means dt is too large relative to the upper
// control bound.
struct SingularSystem : Error {
    using Error::Error;
};

// memory_integral asked to integrate past the stored history.
struct HistoryTooShort : Error {
    using Error::Error;
};

// Armijo backtracking shrank the step below 1e-16 without descent.
struct LineSearchStall : Error {
    using Error::Error;
};

// A multi-start run did not reach the requested residual.
struct NotConverged : Error {
    using Error::Error;
};

// Random pair drew identical controls ten times in a row.
struct DegeneratePair : Error {
    using Error::Error;
};

} // namespace fracbilin
