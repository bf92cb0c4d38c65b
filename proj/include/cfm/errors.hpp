#pragma once

#include <stdexcept>
#include <string>

namespace cfm {

/// Bad input to a public operation (degenerate grid, missing data, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Interface geometry could not be resolved (root finding, projection, tracing).
class GeometryFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A local least-squares system was numerically singular.
class SingularSystem : public std::runtime_error {
public:
    SingularSystem(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// The global linear solve failed or did not reach its tolerance.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace cfm
