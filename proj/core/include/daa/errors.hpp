#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace daa {

/// Raised when caller-supplied parameters violate a documented precondition.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation ran but its result failed a numerical contract
/// (step-size underflow, norm drift, lost unitarity, solver non-convergence).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double time = 0.0)
        : std::runtime_error(what), time_(time) {}

    /// Simulation time at which the failure was detected (0 when not time-related).
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Short %g rendering of a diagnostic value for error messages.
inline std::string diagnostic(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", value);
    return buf;
}

} // namespace daa
