#pragma once

#include <stdexcept>
#include <string>

namespace lcqmc {

// Dense-oracle request above the configured qubit cap.
struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A configuration expected to be logical has a broken chain.
struct NotLogicalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A series is too short (or empty) for the requested estimator.
struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degenerate input made a fit impossible.
struct FitFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lcqmc
