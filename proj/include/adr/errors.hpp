#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adr {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Precondition or argument violation (bad eccentricity, negative tof, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parabolic/hyperbolic or otherwise unsupported orbit regime.
class OutOfScopeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Near-zero angular momentum or other singular orbital state.
class DegenerateOrbitError : public Error {
public:
    using Error::Error;
};

/// Lambert geometry is singular (collinear endpoints, ~180 deg transfer).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Iterative root finder failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed input text; carries 1-based line and column of the offence.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Too few records for the requested operation.
class InsufficientDataError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Every grid point of a leg search failed geometrically.
class LegInfeasibleError : public Error {
public:
    using Error::Error;
};

/// A visitation sequence hit an infeasible leg; carries the failing index.
class SequenceInfeasibleError : public Error {
public:
    SequenceInfeasibleError(const std::string& msg, std::size_t leg_index)
        : Error(msg + " (leg " + std::to_string(leg_index) + ")"),
          leg_index_(leg_index) {}

    std::size_t leg_index() const { return leg_index_; }

private:
    std::size_t leg_index_;
};

/// An action was taken that the mask forbids.
class InvalidActionError : public Error {
public:
    using Error::Error;
};

/// Operation requested on a finished episode.
class TerminalStateError : public Error {
public:
    using Error::Error;
};

/// Episode cannot continue (infeasible leg mid-episode).
class EpisodeAbortError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or gradient during optimization.
class NumericsError : public Error {
public:
    using Error::Error;
};

/// Instance too large for an exhaustive method.
class SizeGuardError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Missing or malformed configuration / checkpoint.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace adr
