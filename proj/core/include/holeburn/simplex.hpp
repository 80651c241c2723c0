#pragma once

#include <functional>
#include <span>
#include <vector>

namespace holeburn {

// Nelder-Mead with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
struct SimplexOptions {
    // Converged when every vertex lies within x_tol * max(1, |x_best|_inf) of
    // the best vertex and the objective spread is below
    // f_tol * (|f_best| + |f(x0)|).
    double x_tol = 1e-8;
    double f_tol = 1e-8;
    int max_iterations = 2000;
    // Initial simplex: x0_j * (1 + initial_step), or zero_step when x0_j == 0,
    // unless explicit per-coordinate steps are given.
    double initial_step = 0.05;
    double zero_step = 0.00025;
    std::vector<double> steps;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Non-finite objective values are treated as +inf. Throws InputError if the
// objective is not finite at x0.
MinimizeResult minimize(const Objective& f, std::vector<double> x0,
                        const SimplexOptions& opts = {});

} // namespace holeburn
