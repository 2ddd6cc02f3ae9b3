// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "rissim/types.hpp"

namespace rissim {

enum class ThetaUpdate { parallel, serial };
enum class WUpdate { linesearch, closed_form };
enum class ObjectiveKind { rate, sinr };
enum class Acceleration { off, squarem };

struct SolverOptions {
    int max_outer_iters = 1000;
    double rel_tol = 1e-6;
    ThetaUpdate theta_update = ThetaUpdate::parallel;
    WUpdate w_update = WUpdate::linesearch;
    ObjectiveKind objective = ObjectiveKind::rate;
    Acceleration acceleration = Acceleration::off;
    bool update_theta = true;  // false freezes the phases (W-only baseline)
    // Max-min solver inner loop.
    int maa_iters_w = 200;
    int maa_iters_theta = 200;
    double maa_tol = 1e-5;
    double maa_stepsize = 1.0; // r in gamma_t = r / sqrt(t)
    double simplex_mass = 1.0; // c
    bool maa_warm_start = false;
    // Rescale r after each step: grow it while h(s) increases, halve it and
    // retry when a step decreases h(s). false keeps r fixed.
    bool maa_adaptive = true;
    // Observer called after every block update with the current objective.
    std::function<void(double)> on_block;
};

} // namespace rissim
