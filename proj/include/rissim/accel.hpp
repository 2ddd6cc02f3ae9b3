// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "rissim/types.hpp"

namespace rissim {

using PointMap = std::function<CVec(const CVec &)>;
using PointObjective = std::function<double(const CVec &)>;

struct SquaremResult {
    CVec x;
    IterationLog log; // one record per cycle; map_evaluations counts calls to step
    int cycles = 0;
    int extrapolated = 0; // cycles that kept the extrapolated point
    int fallbacks = 0;    // cycles that fell back to the plain two-step point
};

// Squared extrapolation around a monotone fixed-point map F:
//   r = F(x) - x, v = F(F(x)) - F(x) - r, alpha = min(-1, -|r| / |v|),
//   x' = project(x - 2 alpha r + alpha^2 v).
// x' is kept only if objective(x') >= objective(F(F(x))). Stops when the
// emitted objective changes by less than rel_tol (relative to max(1, |f|)),
// when v = 0, or after max_evals calls to step.
SquaremResult squarem_wrap(const PointMap &step, const PointMap &project, const PointObjective &objective,
                           const CVec &x0, int max_evals, double rel_tol);

// Flattened views used by the wrapper: [vec(W); theta_1; ...].
CVec flatten(const Design &d);
Design unflatten(const CVec &x, const Design &shape);
CVec flatten(const SrDesign &d);
SrDesign unflatten(const CVec &x, const SrDesign &shape);

} // namespace rissim
