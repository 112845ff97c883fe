#pragma once

#include <functional>

#include "proto/types.hpp"

namespace proto {

struct OptimizerConfig {
    int max_iterations = 300;
    double gradient_tolerance = 1e-7;  // sup-norm of the gradient
    int history_size = 10;             // limited-memory pairs
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
};

struct OptimResult {
    Vec x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Evaluates the objective at x and fills grad with the same length as x.
using ObjectiveFn = std::function<double(const Vec& x, Vec& grad)>;

/// Limited-memory quasi-Newton ascent with a strong-Wolfe line search.
/// Terminates on the gradient sup-norm or the iteration cap. The returned
/// value is never below f(x0); a failed line search returns the best point
/// found with converged = false.
OptimResult quasi_newton_maximize(const ObjectiveFn& f, Vec x0, const OptimizerConfig& cfg);

}  // namespace proto
