// SPDX-License-Identifier: Apache-2.0
#include "rissim/wsr.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bmm_loop.hpp"
#include "rissim/accel.hpp"

namespace rissim {

namespace {

MisoSurrogate miso_surrogate(const SystemConfig &cfg, ObjectiveKind kind, const CMat &W, const CMat &H) {
    const RVec w = user_weights(cfg);
    if (kind == ObjectiveKind::rate)
        return rate_surrogate(compute_wsr_coeffs(W, H, cfg.sigma2()), w, cfg.sigma2());
    return sinr_surrogate(W, H, cfg.sigma2(), w);
}

void check_init(const SystemConfig &cfg, const ChannelSetMiso &ch, const Design &d) {
    std::ostringstream err;
    if (d.W.rows() != ch.M() || d.W.cols() != ch.K())
        err << " W shape";
    else if (!power_feasible(d.W, cfg.power_w, power_constraints(cfg, ch.M(), cfg.power_w)))
        err << " power";
    if (static_cast<int>(d.theta.size()) != ch.L())
        err << " theta count";
    else
        for (int l = 0; l < ch.L(); ++l) {
            const CVec &t = d.theta[l];
            if (t.size() != ch.G0[l].rows() || (t.array().abs() - 1.0).abs().maxCoeff() > 1e-9)
                err << " theta_" << l + 1;
        }
    if (!err.str().empty())
        throw std::invalid_argument("infeasible initial design:" + err.str());
}

} // namespace

Design wsr_outer_step(const SystemConfig &cfg, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                      const SolverOptions &opts, const Design &x, std::vector<double> *block_objs) {
    Design d = x;
    const auto cons = power_constraints(cfg, ch.M(), cfg.power_w);
    auto after_block = [&]() {
        if (!block_objs && !opts.on_block)
            return;
        const double f = miso_objective(d, ch, topo, cfg, opts.objective);
        if (block_objs)
            block_objs->push_back(f);
        if (opts.on_block)
            opts.on_block(f);
    };

    {
        const CMat H = effective_channels(d, ch, topo);
        const MisoSurrogate s = miso_surrogate(cfg, opts.objective, d.W, H);
        const std::vector<CMat> R = column_quadratics(s, H);
        CMat Q(H.rows(), H.cols());
        for (Eigen::Index k = 0; k < H.cols(); ++k)
            Q.col(k) = s.lin(k) * H.col(k);
        if (opts.w_update == WUpdate::closed_form)
            d.W = solve_w_closed_form_columns(R, Q, d.W, cfg.power_w, cons);
        else if (cons.empty())
            d.W = solve_w_columns_total(R, Q, cfg.power_w);
        else
            d.W = solve_w_columns_general(R, Q, cons);
        after_block();
    }

    if (!opts.update_theta)
        return d;
    const auto alphabet = phase_alphabet(cfg);
    for (int l = 1; l <= ch.L(); ++l) {
        bool used = false;
        for (int k = 0; k < ch.K() && !used; ++k)
            used = user_uses_ris(k, l, topo);
        if (!used)
            continue;
        const CMat H = effective_channels(d, ch, topo);
        const MisoSurrogate s = miso_surrogate(cfg, opts.objective, d.W, H);
        CVec &th = d.theta[l - 1];
        if (opts.theta_update == ThetaUpdate::serial) {
            th = update_theta_serial(l, d, s, ch, topo, alphabet);
        } else {
            const ThetaSurrogate ts = theta_surrogate(l, d, s, ch, topo);
            th = alphabet.empty() ? solve_theta_unimodulus(ts.b, &th) : solve_theta_discrete(ts.b, alphabet);
        }
        after_block();
    }
    return d;
}

WsrResult run_wsr_bmm(const SystemConfig &cfg, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                      const SolverOptions &opts, const Design &init) {
    check_init(cfg, ch, init);
    validate_topology(topo, ch.L());
    auto objective = [&](const Design &d) { return miso_objective(d, ch, topo, cfg, opts.objective); };

    if (opts.acceleration == Acceleration::squarem) {
        const auto cons = power_constraints(cfg, ch.M(), cfg.power_w);
        const auto alphabet = phase_alphabet(cfg);
        SolverOptions inner = opts;
        inner.on_block = nullptr;
        const PointMap step = [&](const CVec &v) {
            return flatten(wsr_outer_step(cfg, ch, topo, inner, unflatten(v, init)));
        };
        const PointMap project = [&](const CVec &v) {
            Design d = unflatten(v, init);
            d.W = project_power(d.W, cfg.power_w, cons);
            if (opts.update_theta)
                for (auto &t : d.theta)
                    t = project_phases(t, alphabet);
            else
                d.theta = init.theta;
            return flatten(d);
        };
        const PointObjective obj = [&](const CVec &v) { return objective(unflatten(v, init)); };
        SquaremResult r = squarem_wrap(step, project, obj, flatten(init), opts.max_outer_iters, opts.rel_tol);
        return {unflatten(r.x, init), std::move(r.log)};
    }

    WsrResult out{init, {}};
    out.log = detail::bmm_loop(
        out.design, opts,
        [&](const Design &d, std::vector<double> *blocks) { return wsr_outer_step(cfg, ch, topo, opts, d, blocks); },
        objective);
    return out;
}

} // namespace rissim
