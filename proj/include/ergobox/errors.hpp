#pragma once

#include <stdexcept>
#include <string>

namespace ergobox {

// Configuration / input errors (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg, int line = -1)
        : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_number(line) {}
    int line_number;
};

// Numerical failures: lost convergence, unusable regime, resolution too
// coarse, domain too small (CLI exit code 3).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampler could not produce the requested ensemble (CLI exit code 4).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ergobox
