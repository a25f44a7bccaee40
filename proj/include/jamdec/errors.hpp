#pragma once

#include <stdexcept>
#include <string>

namespace jamdec {

// Caller violated an API precondition (infeasible action, bad epoch, ...).
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

// Configuration file / parameter invariant failure; message names the field.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested exact-model enumeration exceeds the configured state bound.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during training (non-finite loss or gradient).
struct TrainingFault : std::runtime_error {
    explicit TrainingFault(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative solver did not converge within its iteration cap.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace jamdec
