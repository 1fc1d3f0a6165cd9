#pragma once

#include <stdexcept>
#include <string>

namespace matrec {

/// Base class for every error thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- index set construction ---
struct empty_set_error : error {
    using error::error;
};
struct non_positive_entry_error : error {
    using error::error;
};

// --- analytic preconditions ---
struct singleton_set_error : error {
    using error::error;
};
struct periodic_set_error : error {
    using error::error;
};
struct index_out_of_range_error : error {
    using error::error;
};
struct not_consecutive_error : error {
    using error::error;
};
struct not_scalar_error : error {
    using error::error;
};
struct zero_norm_error : error {
    using error::error;
};

// --- resource limits ---
struct budget_exceeded_error : error {
    using error::error;
};
struct size_overflow_error : error {
    using error::error;
};

// --- numerics ---
struct convergence_failure_error : error {
    using error::error;
};
struct dimension_mismatch_error : error {
    using error::error;
};

/// Raised while validating an external spec file; carries a field path in the message.
struct spec_error : error {
    using error::error;
};

} // namespace matrec
