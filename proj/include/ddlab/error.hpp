#pragma once

#include <stdexcept>
#include <string>

namespace ddlab {

/// A precondition on user-supplied parameters was violated (bad dimension,
/// negative noise, malformed grid, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not produce a meaningful number: a singular coupled
/// system, a pole in the replica solution, a fixed point that did not converge.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ddlab
