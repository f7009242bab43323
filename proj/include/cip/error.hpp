#pragma once

#include <stdexcept>
#include <string>

namespace cip {

// Malformed or inconsistent input: wrong dimensions, invalid probability
// vectors, non-orthonormal bases, out-of-range parameters.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// The numerics did not reach the requested accuracy (solver stalled,
// infeasibility detected, or a result violated a checked invariant).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cip
