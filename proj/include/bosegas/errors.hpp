#pragma once

#include <stdexcept>
#include <string>

namespace bosegas {

/// Thrown when an argument is outside the documented parameter domain
/// (nonpositive rate, zero grid spacing, index out of range, ...).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a value is outside the mathematical domain of an operation
/// (nonpositive energy gap in the occupation factor, mu >= ground level, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown when a stated hypothesis of an analytic bound is not met,
/// as opposed to a plain bad argument (e.g. gap shorter than twice the
/// obstacle support in the ground-level lower bound).
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a computed spectrum is too short for the requested
/// thermodynamic evaluation; callers should recompute with more levels.
class TruncatedSpectrum : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when an iterative scheme fails to converge or two independent
/// numerical routes disagree; carries the offending values in the message.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace bosegas
