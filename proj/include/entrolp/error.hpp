#pragma once

#include <stdexcept>
#include <string>

namespace entrolp {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed PD text, expressions, modifiers, or a term that cannot be expanded.
struct parse_error : error {
    using error::error;
};

// The symmetry rows do not form a permutation group.
struct symmetry_error : error {
    using error::error;
};

// The input is well formed but the requested mode cannot use it.
struct mode_error : error {
    using error::error;
};

struct solver_error : error {
    using error::error;
};

struct eval_error : error {
    using error::error;
};

} // namespace entrolp
