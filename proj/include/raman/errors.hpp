#pragma once

#include <stdexcept>
#include <string>

namespace raman {

// Two time series were combined although they live on different grids.
struct GridMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The requested emission target cannot be produced by any laser pulse:
// the excited-state population budget goes negative somewhere.
struct InfeasibleError : std::runtime_error {
    double t_violation;  // time (ps) where the budget is most negative
    double margin;       // minimum of the population budget over the window

    InfeasibleError(double t, double m)
        : std::runtime_error("target infeasible: population budget " + std::to_string(m) +
                             " at t = " + std::to_string(t) + " ps"),
          t_violation(t), margin(m) {}
};

// Finite-difference derivatives of a sampled target are too noisy to trust.
struct DerivativeNoiseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An integration run violated one of its internal consistency checks
// (norm bookkeeping, density-matrix positivity, truncation budget).
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad scenario configuration (unknown key, missing unit, inconsistent block).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Swap protocol scheduling conflict (send and receive windows overlap, or a
// pulse leaks outside its assigned window).
struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace raman
