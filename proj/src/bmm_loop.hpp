// SPDX-License-Identifier: Apache-2.0
// Outer loop shared by the three solvers.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "rissim/solver_options.hpp"
#include "rissim/types.hpp"

namespace rissim::detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline bool small_change(double prev, double next, double tol) {
    return std::abs(next - prev) / std::max(1.0, std::abs(prev)) < tol;
}

// step(x, &block_objectives) -> next point.
template <class X, class Step, class Objective>
IterationLog bmm_loop(X &x, const SolverOptions &opts, Step step, Objective objective) {
    IterationLog log;
    const auto t0 = std::chrono::steady_clock::now();
    double f = objective(x);
    log.iters.push_back({f, 0.0, {}});
    for (int it = 0; it < opts.max_outer_iters; ++it) {
        std::vector<double> blocks;
        x = step(x, &blocks);
        ++log.map_evaluations;
        const double fn = objective(x);
        log.iters.push_back({fn, elapsed_ms(t0), std::move(blocks)});
        const bool done = small_change(f, fn, opts.rel_tol);
        f = fn;
        if (done) {
            log.converged = true;
            break;
        }
    }
    return log;
}

} // namespace rissim::detail
