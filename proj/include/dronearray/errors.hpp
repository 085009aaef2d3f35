#ifndef DRONEARRAY_ERRORS_HPP
#define DRONEARRAY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dronearray {

// Bad inputs: malformed config, invariant violations, infeasible setups
// detectable before any numerics run. CLI maps these to exit code 1.
class validation_error : public std::runtime_error {
public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures and physical infeasibilities discovered while solving
// (singular systems, thrust authority exceeded, diverging integration).
// CLI maps these to exit code 2.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dronearray

#endif
