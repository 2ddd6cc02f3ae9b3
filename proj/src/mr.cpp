// SPDX-License-Identifier: Apache-2.0
#include "rissim/mr.hpp"

#include <cmath>
#include <stdexcept>

#include "bmm_loop.hpp"
#include "rissim/accel.hpp"
#include "rissim/surrogates.hpp"
#include "rissim/wsr.hpp"

namespace rissim {

RVec user_rates(const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                const SystemConfig &cfg) {
    const SinrTerms t = sinr_terms(design.W, effective_channels(design, ch, topo), cfg.sigma2());
    return t.sinr.array().log1p();
}

double mr_objective(const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                    const SystemConfig &cfg) {
    return user_rates(design, ch, topo, cfg).minCoeff();
}

SimplexState uniform_simplex(int K, double r, double c) {
    if (K < 1 || !(r > 0.0) || !(c > 0.0))
        throw std::invalid_argument("uniform_simplex: need K >= 1, r > 0, c > 0");
    SimplexState st;
    st.s = RVec::Constant(K, c / K);
    st.r = r;
    st.c = c;
    return st;
}

SimplexState maa_step(const SimplexState &state, const RVec &g) {
    if (g.size() != state.s.size())
        throw std::invalid_argument("maa_step: size mismatch");
    const double gamma = state.r / std::sqrt(static_cast<double>(state.t));
    // Shifting by min(g) keeps every exponent <= 0 and leaves s+ unchanged.
    const RVec e = (-gamma * (g.array() - g.minCoeff())).exp();
    RVec s = state.s.array() * e.array();
    s *= state.c / s.sum();
    // Keep the iterate strictly interior.
    const double floor = 1e-300;
    bool clipped = false;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) < floor) {
            s(k) = floor;
            clipped = true;
        }
    if (clipped)
        s *= state.c / s.sum();
    SimplexState out = state;
    out.s = s;
    ++out.t;
    return out;
}

MrWTerms mr_w_terms(const CMat &W, const CMat &H, double sigma2) {
    const WsrCoeffs co = compute_wsr_coeffs(W, H, sigma2);
    const Eigen::Index K = H.cols();
    MrWTerms t{{}, {}, RVec(K)};
    for (Eigen::Index k = 0; k < K; ++k) {
        t.R.push_back(co.alpha(k) * H.col(k) * H.col(k).adjoint());
        t.q.push_back(co.beta(k) * H.col(k));
        t.constant(k) = co.rate(k) - co.sinr(k) - co.alpha(k) * sigma2;
    }
    return t;
}

CMat mr_w_inner_solve(const RVec &s, const MrWTerms &terms, double P, const std::vector<PowerConstraint> &cons) {
    const Eigen::Index K = s.size();
    const Eigen::Index M = terms.q.at(0).size();
    CMat R = CMat::Zero(M, M);
    CMat Q(M, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        R += s(k) * terms.R[k];
        Q.col(k) = s(k) * terms.q[k];
    }
    R = 0.5 * (R + R.adjoint()).eval();
    return cons.empty() ? solve_w_total_power(R, Q, P) : solve_w_general_power(R, Q, cons);
}

RVec mr_w_subgradient(const CMat &X, const MrWTerms &terms) {
    const Eigen::Index K = static_cast<Eigen::Index>(terms.R.size());
    RVec g(K);
    for (Eigen::Index k = 0; k < K; ++k)
        g(k) = (X.adjoint() * terms.R[k] * X).trace().real() - 2.0 * X.col(k).dot(terms.q[k]).real() -
               terms.constant(k);
    return g;
}

MrThetaTerms mr_theta_terms(int l, const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                            const SystemConfig &cfg) {
    const double sigma2 = cfg.sigma2();
    const CMat H = effective_channels(design, ch, topo);
    const WsrCoeffs co = compute_wsr_coeffs(design.W, H, sigma2);
    const int K = ch.K();
    MrThetaTerms out{{}, RVec(K)};
    for (int k = 0; k < K; ++k) {
        MisoSurrogate s{RMat::Zero(K, K), CVec::Zero(K), 0.0, true};
        s.c.row(k).setConstant(co.alpha(k));
        s.lin(k) = co.beta(k);
        s.c0 = co.rate(k) - co.sinr(k) - co.alpha(k) * sigma2;
        const ThetaSurrogate ts = theta_surrogate(l, design, s, ch, topo);
        out.b.push_back(ts.b);
        out.c0(k) = ts.c0;
    }
    return out;
}

CVec mr_theta_inner_solve(const RVec &s, const std::vector<CVec> &b, const CVec *fallback) {
    CVec sum = CVec::Zero(b.at(0).size());
    for (std::size_t k = 0; k < b.size(); ++k)
        sum += s(static_cast<Eigen::Index>(k)) * b[k];
    return solve_theta_unimodulus(sum, fallback);
}

RVec mr_theta_subgradient(const CVec &theta, const MrThetaTerms &terms) {
    RVec g(terms.c0.size());
    for (Eigen::Index k = 0; k < g.size(); ++k)
        g(k) = 2.0 * theta.dot(terms.b[k]).real() - terms.c0(k);
    return g;
}

namespace {

struct MaaOutcome {
    bool improved = false;
    RVec s;
};

// Mirror ascent on h(s) = min_x sum_k s_k phi_k(x) / c. inner(s) returns the
// minimizer, sub(x) the vector phi(x); candidates are scored by -max_k phi_k.
// Stops when the duality gap max_k phi_k(x(s)) - h(s) falls below the
// tolerance, which certifies the block as solved to that accuracy.
template <class X, class Inner, class Sub>
MaaOutcome run_maa(X &best, double anchor_value, const SolverOptions &opts, int iters, const RVec &s0,
                   Inner inner, Sub sub, bool average) {
    SimplexState st;
    st.s = s0;
    st.r = opts.maa_stepsize;
    st.c = opts.simplex_mass;
    double best_val = anchor_value;
    MaaOutcome out;
    auto consider = [&](const X &x, const RVec &g) {
        if (-g.maxCoeff() > best_val) {
            best_val = -g.maxCoeff();
            best = x;
            out.improved = true;
        }
    };
    X x = inner(st.s);
    RVec g = sub(x);
    double h = st.s.dot(g) / st.c;
    consider(x, g);
    X avg = x;
    int accepted = 1;
    for (int it = 1; it < iters; ++it) {
        if (g.maxCoeff() - h <= opts.maa_tol * std::max(1.0, std::abs(h)))
            break;
        const SimplexState cand = maa_step(st, -g);
        const X xn = inner(cand.s);
        const RVec gn = sub(xn);
        const double hn = cand.s.dot(gn) / cand.c;
        consider(xn, gn);
        if (opts.maa_adaptive && hn < h) {
            st.r *= 0.5;
            continue;
        }
        st = cand;
        x = xn;
        g = gn;
        h = hn;
        if (opts.maa_adaptive)
            st.r *= 1.25;
        if (average) {
            ++accepted;
            avg = X(avg + (x - avg) / static_cast<double>(accepted));
            const RVec ga = sub(avg);
            consider(avg, ga);
        }
    }
    out.s = st.s;
    return out;
}

} // namespace

Design mr_outer_step(const SystemConfig &cfg, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                     const SolverOptions &opts, const Design &x, std::vector<double> *block_objs, int *rejected,
                     MaaWarm *warm) {
    Design d = x;
    const int K = ch.K();
    const auto cons = power_constraints(cfg, ch.M(), cfg.power_w);
    MaaWarm local;
    MaaWarm &ws = warm ? *warm : local;
    const RVec uniform = RVec::Constant(K, opts.simplex_mass / K);
    auto start = [&](const RVec &w0) { return opts.maa_warm_start && w0.size() == K ? w0 : uniform; };
    auto after_block = [&]() {
        if (!block_objs && !opts.on_block)
            return;
        const double f = mr_objective(d, ch, topo, cfg);
        if (block_objs)
            block_objs->push_back(f);
        if (opts.on_block)
            opts.on_block(f);
    };

    {
        const CMat H = effective_channels(d, ch, topo);
        const MrWTerms terms = mr_w_terms(d.W, H, cfg.sigma2());
        const double anchor = -mr_w_subgradient(d.W, terms).maxCoeff();
        CMat best = d.W;
        const MaaOutcome o = run_maa(
            best, anchor, opts, opts.maa_iters_w, start(ws.w),
            [&](const RVec &s) { return mr_w_inner_solve(s, terms, cfg.power_w, cons); },
            [&](const CMat &X) { return mr_w_subgradient(X, terms); }, true);
        ws.w = o.s;
        if (!o.improved && rejected)
            ++*rejected;
        d.W = best;
        after_block();
    }

    if (!opts.update_theta)
        return d;
    const auto alphabet = phase_alphabet(cfg);
    for (int l = 1; l <= ch.L(); ++l) {
        const MrThetaTerms terms = mr_theta_terms(l, d, ch, topo, cfg);
        CVec &th = d.theta[l - 1];
        const double anchor = -mr_theta_subgradient(th, terms).maxCoeff();
        CVec best = th;
        const CVec prev = th;
        const MaaOutcome o = run_maa(
            best, anchor, opts, opts.maa_iters_theta, start(ws.theta),
            [&](const RVec &s) {
                if (alphabet.empty())
                    return mr_theta_inner_solve(s, terms.b, &prev);
                CVec sum = CVec::Zero(prev.size());
                for (int k = 0; k < K; ++k)
                    sum += s(k) * terms.b[k];
                return solve_theta_discrete(sum, alphabet);
            },
            [&](const CVec &t) { return mr_theta_subgradient(t, terms); }, false);
        ws.theta = o.s;
        if (!o.improved && rejected)
            ++*rejected;
        th = best;
        after_block();
    }
    return d;
}

MrResult run_mr_bmm(const SystemConfig &cfg, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                    const SolverOptions &opts, const Design &init) {
    if (!power_feasible(init.W, cfg.power_w, power_constraints(cfg, ch.M(), cfg.power_w)) ||
        init.W.rows() != ch.M() || init.W.cols() != ch.K() || static_cast<int>(init.theta.size()) != ch.L())
        throw std::invalid_argument("infeasible initial design");
    for (const auto &t : init.theta)
        if ((t.array().abs() - 1.0).abs().maxCoeff() > 1e-9)
            throw std::invalid_argument("infeasible initial design: phases not unit modulus");
    validate_topology(topo, ch.L());
    auto objective = [&](const Design &d) { return mr_objective(d, ch, topo, cfg); };

    MrResult out{init, {}, 0};
    MaaWarm warm;
    if (opts.acceleration == Acceleration::squarem) {
        const auto cons = power_constraints(cfg, ch.M(), cfg.power_w);
        const auto alphabet = phase_alphabet(cfg);
        SolverOptions inner = opts;
        inner.on_block = nullptr;
        const PointMap step = [&](const CVec &v) {
            return flatten(mr_outer_step(cfg, ch, topo, inner, unflatten(v, init), nullptr, &out.rejected_blocks, &warm));
        };
        const PointMap project = [&](const CVec &v) {
            Design d = unflatten(v, init);
            d.W = project_power(d.W, cfg.power_w, cons);
            for (auto &t : d.theta)
                t = project_phases(t, alphabet);
            return flatten(d);
        };
        const PointObjective obj = [&](const CVec &v) { return objective(unflatten(v, init)); };
        SquaremResult r = squarem_wrap(step, project, obj, flatten(init), opts.max_outer_iters, opts.rel_tol);
        out.design = unflatten(r.x, init);
        out.log = std::move(r.log);
        return out;
    }
    out.log = detail::bmm_loop(
        out.design, opts,
        [&](const Design &d, std::vector<double> *blocks) {
            return mr_outer_step(cfg, ch, topo, opts, d, blocks, &out.rejected_blocks, &warm);
        },
        objective);
    return out;
}

} // namespace rissim
