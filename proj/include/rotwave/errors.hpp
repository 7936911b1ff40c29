#ifndef ROTWAVE_ERRORS_HPP
#define ROTWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rotwave {

// Solver/quadrature breakdown at runtime (CFL blow-up, non-convergent
// elliptic solve, ...). Maps to process exit code 3.
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

// Bad or inconsistent configuration input. Maps to process exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rotwave

#endif
