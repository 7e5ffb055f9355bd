#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace regobs {

/// Scenario or config violated one or more structural invariants.
struct ValidationError : std::runtime_error {
    std::vector<std::string> violations;
    explicit ValidationError(std::vector<std::string> v)
        : std::runtime_error(join(v)), violations(std::move(v)) {}

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "validation failed:";
        for (const auto& e : v) s += "\n  - " + e;
        return s;
    }
};

/// Gain design cannot succeed for the given configuration.
struct DesignInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Output record is not consistent with the model (reconstruction residual).
struct InconsistentRecord : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested integrator step exceeds the explicit stability guard.
struct StepTooLarge : std::runtime_error {
    double suggested_dt;
    StepTooLarge(const std::string& msg, double dt)
        : std::runtime_error(msg), suggested_dt(dt) {}
};

}  // namespace regobs
