#pragma once
#include <stdexcept>
#include <string>

namespace gflab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user input: ladder parameters, config files, catalog ids.
struct ConfigError : Error {
    using Error::Error;
};

/// Geometry mismatch: region outside grid, incompatible family members.
struct DomainError : Error {
    using Error::Error;
};

/// Grid too coarse to resolve a scaled mollifier.
struct ResolutionError : Error {
    using Error::Error;
};

/// Picard iteration ran out of sweeps; carries the last sup-change.
struct ConvergenceError : Error {
    double residual;
    ConvergenceError(const std::string& what, double residual_)
        : Error(what), residual(residual_) {}
};

/// Scenario data violate the hypotheses of the proposition being tested.
struct HypothesisError : Error {
    using Error::Error;
};

/// Regularity cells incompatible with the coarsest member grid.
struct CellizationError : Error {
    using Error::Error;
};

/// Fewer than four usable points for an order regression.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// Mollifier moment system too ill-conditioned; carries the estimate.
struct ConstructionError : Error {
    double condition;
    ConstructionError(const std::string& what, double condition_)
        : Error(what), condition(condition_) {}
};

} // namespace gflab
