#pragma once

#include <stdexcept>
#include <string>

namespace dce {

// Thrown when a propagation step loses norm or trace beyond the configured tolerance.
struct PropagationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a state leaks too much population into the top of the truncated basis.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when conditioning on an outcome whose probability is below the floor.
struct ImpossibleOutcomeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a derivative fit is ill-conditioned or otherwise unusable.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when cavity reset fails to reach the vacuum-fidelity target.
struct ResetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown for malformed configuration files or invalid parameter combinations.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dce
