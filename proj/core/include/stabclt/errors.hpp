#pragma once

#include <stdexcept>
#include <string>

namespace stabclt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Hypergeometric series hit a nonpositive-integer lower parameter.
class PoleError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Geometry or configuration violates a structural invariant
/// (overlapping boxes, mismatched dimensions, overlapping regions).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

class EmptyCoverError : public Error {
public:
    using Error::Error;
};

/// A point configuration has too few points for the requested neighbour query.
class InsufficientPointsError : public Error {
public:
    using Error::Error;
};

class DegenerateComponentError : public Error {
public:
    using Error::Error;
};

class GridTooLargeError : public Error {
public:
    using Error::Error;
};

} // namespace stabclt
