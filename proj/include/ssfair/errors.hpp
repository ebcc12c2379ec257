#pragma once

#include <stdexcept>

namespace ssfair {

// Invalid configuration (bad flag values, infeasible counts). CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input data. CLI exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken internal invariant (non-finite gradients, shape mismatch mid-run).
// CLI exit code 4.
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ssfair
