#pragma once

#include <stdexcept>
#include <string>

namespace cvtrans {

// Raised when a computation cannot proceed: unbracketed root, unphysical
// state, degenerate measurement variance. Domain violations on inputs use
// std::invalid_argument instead.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cvtrans
