#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace drmdp {

/// Raised when array shapes do not agree (value function length, kernel size, ...).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative solver ran out of iterations. Carries the best value found.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, double best_value, double residual)
        : std::runtime_error(what), best_value_(best_value), residual_(residual) {}

    double best_value() const noexcept { return best_value_; }
    double residual() const noexcept { return residual_; }

private:
    double best_value_;
    double residual_;
};

/// Inner solver failure inside a Bellman application, tagged with the state.
class StateSolveError : public NonConvergenceError {
public:
    StateSolveError(std::size_t state, const NonConvergenceError& cause)
        : NonConvergenceError("state " + std::to_string(state) + ": " + cause.what(),
                              cause.best_value(), cause.residual()),
          state_(state) {}

    std::size_t state() const noexcept { return state_; }

private:
    std::size_t state_;
};

/// Value iteration hit max_sweeps. Carries the last iterate.
class SweepLimitError : public std::runtime_error {
public:
    SweepLimitError(const std::string& what, std::vector<double> last_iterate, double residual)
        : std::runtime_error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double residual() const noexcept { return residual_; }

private:
    std::vector<double> last_iterate_;
    double residual_;
};

} // namespace drmdp
