#pragma once

#include <stdexcept>

namespace hadr {

// Raised for bad input data: unreadable files, malformed rows, label or
// dimension mismatches.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an optimizer or training loop fails (non-finite loss,
// divergence). The message carries the iteration or epoch index.
struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace hadr
