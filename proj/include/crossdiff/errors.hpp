#pragma once

#include <stdexcept>
#include <string>

namespace crossdiff {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (invalid coefficients, bad grid, ...).
struct invalid_argument_error : error {
    using error::error;
};

/// A root bracket could not be established (marginal-parameter search).
struct bracket_error : error {
    using error::error;
};

/// The requested unstable band is empty (discriminant < 0) or undefined.
struct band_error : error {
    using error::error;
};

/// A kernel computation failed: the matrix is not critical, or is degenerate.
struct kernel_error : error {
    using error::error;
};

/// A linear system was singular or an iteration diverged.
struct solver_error : error {
    using error::error;
};

/// Malformed configuration file or missing keys.
struct config_error : error {
    using error::error;
};

}  // namespace crossdiff
