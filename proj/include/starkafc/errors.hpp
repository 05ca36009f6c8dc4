#pragma once

#include <stdexcept>
#include <string>

namespace starkafc {

// Bad scenario input: unknown keys, out-of-range values, malformed files.
// CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Simulation left its validity domain: unstable step, unresolvable grid,
// non-finite values. CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace starkafc
