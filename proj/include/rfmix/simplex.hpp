#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rfmix {

struct SimplexOptions {
    int max_evals = 200;
    double init_step = 1e-2;
    double x_tol = 1e-10;      // simplex size counted as stalled
    double f_target = -1e300;  // stop as soon as a point reaches this value
    std::uint64_t seed = 1;    // orientation of the initial simplex
    bool restart_on_stall = true;
};

struct SimplexEval {
    std::vector<double> x;
    double f = 0.0;
    double best_f = 0.0; // best value seen up to and including this evaluation
};

struct SimplexResult {
    std::vector<double> x;
    double f = 0.0;
    int evals = 0;
    bool reached_target = false;
    bool restarted = false;
    std::vector<SimplexEval> trace;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead with the standard coefficients (1, 2, 1/2, 1/2). When the
/// simplex collapses below x_tol without reaching f_target it restarts once
/// from the best point at half the initial step. Always returns the best
/// point evaluated.
SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, const SimplexOptions& opt);

} // namespace rfmix
