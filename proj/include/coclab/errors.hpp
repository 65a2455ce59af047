#pragma once

#include <stdexcept>
#include <string>

namespace coclab {

/// Base class for all errors thrown by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : error {
    using error::error;
};

struct dimension_error : error {
    using error::error;
};

struct precondition_error : error {
    using error::error;
};

struct no_convergence_error : error {
    using error::error;
};

struct insufficient_mass_error : error {
    using error::error;
};

struct singular_input_error : error {
    using error::error;
};

struct degenerate_variance_error : error {
    using error::error;
};

struct grid_mismatch_error : error {
    using error::error;
};

struct empty_sample_error : error {
    using error::error;
};

struct singularity_error : error {
    using error::error;
};

} // namespace coclab
