#ifndef NANOWALL_ERRORS_HPP
#define NANOWALL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nanowall {

// Invalid user-facing parameters (grid sizes, config files, CLI input).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// State left the small-perturbation chart (v - M0 too large, decomposition
// refused, or the Newton solve did not converge).
struct ChartError : std::runtime_error {
    explicit ChartError(const std::string& msg) : std::runtime_error(msg) {}
};

// Time integration produced NaN/overflow.
struct IntegrationDiverged : std::runtime_error {
    long long step;
    explicit IntegrationDiverged(long long step_index)
        : std::runtime_error("integration diverged at step " + std::to_string(step_index)),
          step(step_index) {}
};

// Eigensolver / projection failure (near-singular mode Gram matrix, LAPACK info != 0,
// Krylov iteration that did not converge).
struct DiagnosticsError : std::runtime_error {
    explicit DiagnosticsError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nanowall

#endif
