#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Simultaneous root iteration failed to converge within its budget.
struct RootSolveFailure : Error {
    using Error::Error;
};

/// The requested point is too close to a critical value; the preimage
/// fiber contains a multiple root and the Ruelle sum is not defined.
struct CriticalFiber : Error {
    using Error::Error;
};

/// A preimage landed within tolerance of a pole of the test function.
struct PoleHit : Error {
    using Error::Error;
};

/// The derivative vanishes at the requested point.
struct CriticalPoint : Error {
    using Error::Error;
};

/// A cell or node budget was exhausted before convergence.
struct BudgetExceeded : Error {
    using Error::Error;
};

/// The point lies outside the domain of the metric or kernel.
struct OutsideDomain : Error {
    using Error::Error;
};

/// Elliptic invariants with vanishing discriminant.
struct DegenerateInvariants : Error {
    using Error::Error;
};

/// A branch-point list of the wrong size.
struct BadPointCount : Error {
    using Error::Error;
};

/// An operation required a resolved (eventually periodic) postcritical set.
struct UnresolvedPostcritical : Error {
    using Error::Error;
};

/// A pointwise rule failed the integrability pre-check.
struct NotIntegrable : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

/// Malformed input file; message names the offending field.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace rlab
