#pragma once

#include <stdexcept>

namespace brt {

// Parameter outside a formula's stated index range. Callers can usually fall
// back to the enumeration oracle for small instances.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Request refused because it exceeds a configured cap (enumeration size,
// sample storage). The message names the cap that was hit.
struct resource_limit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inconsistent arguments (mismatched tables, malformed input strings).
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace brt
