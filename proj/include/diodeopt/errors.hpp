#pragma once

#include <stdexcept>
#include <string>

namespace diodeopt {

// Invalid physical inputs or out-of-domain arguments.
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Newton / root-finding failure. Carries enough state for the caller to retry
// with a finer grid or a different continuation ladder.
class SolveError : public std::runtime_error {
  public:
    SolveError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual(residual), iterations(iterations) {}
    double residual = 0.0;
    int iterations = 0;
};

// Configuration parsing/validation problems (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Optimizer could not produce/maintain a feasible iterate (CLI exit code 4).
class InfeasibleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace diodeopt
