#pragma once

#include <stdexcept>
#include <string>

namespace dtnjordan {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidMeshError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct EllipticityError : Error {
    using Error::Error;
};

/// The weak residual of f has non-negligible interior part, so f does not
/// represent a vector in the operator domain for the given (lambda, h).
struct NotInOperatorDomainError : Error {
    using Error::Error;
};

/// lambda is inside the configured margin around the Dirichlet spectrum.
struct ResolventViolationError : Error {
    using Error::Error;
};

/// The integration disk touches the Dirichlet spectrum.
struct ContourViolationError : Error {
    using Error::Error;
};

struct OrderError : Error {
    using Error::Error;
};

struct InfeasibleCoercivityError : Error {
    using Error::Error;
};

struct ConstructionError : Error {
    using Error::Error;
};

struct DegenerateSeedError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace dtnjordan
