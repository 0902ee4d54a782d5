#pragma once

#include <stdexcept>
#include <string>

namespace t4 {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A requested eigenvalue branch could not be located below the search ceiling.
struct BranchNotFound : Error {
    using Error::Error;
};

/// FD grid cannot resolve the requested number of modes.
struct GridTooCoarse : Error {
    using Error::Error;
};

/// A defining equation has no root in the search window.
struct NoSolution : Error {
    using Error::Error;
};

/// Reaction parameters do not satisfy the conditions a region family needs.
struct PreconditionError : Error {
    using Error::Error;
};

/// Banded factorization or eigen-solve failed.
struct SolverFailure : Error {
    using Error::Error;
};

struct NoSteadyState : Error {
    using Error::Error;
};

}  // namespace t4
