#pragma once

#include <stdexcept>
#include <string>

namespace odeig {

// Numerical failures that callers may want to catch separately from
// precondition violations (which are reported as std::invalid_argument).

// A column became numerically dependent during orthonormalization.
struct RankDeficiencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative solve hit its iteration budget before meeting tolerance.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two internally redundant computations disagreed; results are untrustworthy.
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A power-iteration update vector vanished; the caller should restart.
struct ZeroUpdateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace odeig
