// SPDX-License-Identifier: Apache-2.0
#include "rissim/accel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "bmm_loop.hpp"

namespace rissim {

SquaremResult squarem_wrap(const PointMap &step, const PointMap &project, const PointObjective &objective,
                           const CVec &x0, int max_evals, double rel_tol) {
    SquaremResult out;
    out.x = x0;
    const auto t0 = std::chrono::steady_clock::now();
    double f = objective(x0);
    out.log.iters.push_back({f, 0.0, {}});
    while (out.log.map_evaluations + 2 <= max_evals) {
        const CVec x1 = step(out.x);
        const CVec x2 = step(x1);
        out.log.map_evaluations += 2;
        ++out.cycles;
        const CVec r = x1 - out.x;
        const CVec v = x2 - x1 - r;
        const double f2 = objective(x2);
        const double vn = v.norm();
        CVec next = x2;
        double fn = f2;
        if (vn > 0.0) {
            const double alpha = std::min(-1.0, -r.norm() / vn);
            if (alpha < -1.0) {
                const CVec cand = project(out.x - 2.0 * alpha * r + alpha * alpha * v);
                const double fc = objective(cand);
                if (std::isfinite(fc) && fc >= f2) {
                    next = cand;
                    fn = fc;
                    ++out.extrapolated;
                } else {
                    ++out.fallbacks;
                }
            }
        }
        out.x = next;
        std::vector<double> blocks{f2, fn};
        out.log.iters.push_back({fn, detail::elapsed_ms(t0), std::move(blocks)});
        const bool done = vn == 0.0 || detail::small_change(f, fn, rel_tol);
        f = fn;
        if (done) {
            out.log.converged = true;
            break;
        }
    }
    return out;
}

CVec flatten(const Design &d) {
    Eigen::Index n = d.W.size();
    for (const auto &t : d.theta)
        n += t.size();
    CVec x(n);
    x.head(d.W.size()) = d.W.reshaped();
    Eigen::Index o = d.W.size();
    for (const auto &t : d.theta) {
        x.segment(o, t.size()) = t;
        o += t.size();
    }
    return x;
}

Design unflatten(const CVec &x, const Design &shape) {
    Design d = shape;
    if (x.size() != flatten(shape).size())
        throw std::invalid_argument("unflatten: size mismatch");
    d.W = x.head(shape.W.size()).reshaped(shape.W.rows(), shape.W.cols());
    Eigen::Index o = shape.W.size();
    for (auto &t : d.theta) {
        t = x.segment(o, t.size());
        o += t.size();
    }
    return d;
}

CVec flatten(const SrDesign &d) {
    Eigen::Index n = d.theta.size();
    for (const auto &w : d.W)
        n += w.size();
    CVec x(n);
    Eigen::Index o = 0;
    for (const auto &w : d.W) {
        x.segment(o, w.size()) = w.reshaped();
        o += w.size();
    }
    x.tail(d.theta.size()) = d.theta;
    return x;
}

SrDesign unflatten(const CVec &x, const SrDesign &shape) {
    SrDesign d = shape;
    if (x.size() != flatten(shape).size())
        throw std::invalid_argument("unflatten: size mismatch");
    Eigen::Index o = 0;
    for (auto &w : d.W) {
        w = x.segment(o, w.size()).reshaped(w.rows(), w.cols());
        o += w.size();
    }
    d.theta = x.tail(shape.theta.size());
    return d;
}

} // namespace rissim
