// SPDX-License-Identifier: Apache-2.0
#include "rissim/sr.hpp"

#include <cmath>
#include <stdexcept>

#include "bmm_loop.hpp"
#include "rissim/accel.hpp"
#include "rissim/numerics.hpp"
#include "rissim/wsr.hpp"

namespace rissim {

std::vector<std::vector<CMat>> mimo_links(const CVec &theta, const ChannelSetMimo &ch) {
    const int K = ch.K();
    std::vector<std::vector<CMat>> H(K);
    for (int k = 0; k < K; ++k) {
        const CMat HrT = ch.Hr[k] * theta.asDiagonal();
        for (int j = 0; j < K; ++j)
            H[k].push_back(HrT * ch.Gt[j] + ch.Hd[k][j]);
    }
    return H;
}

CMat interference_covariance(int k, const SrDesign &design, const std::vector<std::vector<CMat>> &H,
                             double sigma2) {
    const Eigen::Index Mr = H[k][k].rows();
    CMat T = sigma2 * CMat::Identity(Mr, Mr);
    for (std::size_t j = 0; j < H[k].size(); ++j) {
        if (static_cast<int>(j) == k)
            continue;
        const CMat X = H[k][j] * design.W[j];
        T.noalias() += X * X.adjoint();
    }
    return 0.5 * (T + T.adjoint());
}

namespace {

double rate_with_jitter(const CMat &X, CMat Y, double sigma2) {
    try {
        return logdet_rate(X, Y);
    } catch (const std::invalid_argument &) {
        Y.diagonal().array() += 1e-12 * sigma2;
        return logdet_rate(X, Y);
    }
}

} // namespace

RVec pair_rates(const SrDesign &design, const ChannelSetMimo &ch, const SystemConfig &cfg) {
    const auto H = mimo_links(design.theta, ch);
    RVec r(ch.K());
    for (int k = 0; k < ch.K(); ++k)
        r(k) = rate_with_jitter(H[k][k] * design.W[k], interference_covariance(k, design, H, cfg.sigma2()),
                                cfg.sigma2());
    return r;
}

double sr_objective(const SrDesign &design, const ChannelSetMimo &ch, const SystemConfig &cfg) {
    return pair_rates(design, ch, cfg).sum();
}

SrCoeffs compute_sr_coeffs(const SrDesign &design, const ChannelSetMimo &ch, const SystemConfig &cfg) {
    const auto H = mimo_links(design.theta, ch);
    SrCoeffs c;
    c.rate.resize(ch.K());
    for (int k = 0; k < ch.K(); ++k) {
        const CMat X = H[k][k] * design.W[k];
        const CMat T = interference_covariance(k, design, H, cfg.sigma2());
        const MatrixMinorizer m = matrix_rate_minorizer(X, T);
        c.A.push_back(m.A);
        c.B.push_back(m.B);
        c.c0.push_back(m.c0);
        c.rate(k) = logdet_rate(X, T);
    }
    return c;
}

double sr_surrogate_value(const SrCoeffs &coeffs, const SrDesign &design, const ChannelSetMimo &ch,
                          double sigma2) {
    const auto H = mimo_links(design.theta, ch);
    double v = 0.0;
    for (int k = 0; k < ch.K(); ++k) {
        const MatrixMinorizer m{coeffs.A[k], coeffs.B[k], coeffs.c0[k]};
        v += m(H[k][k] * design.W[k], interference_covariance(k, design, H, sigma2));
    }
    return v;
}

WkQuadratic build_wk_quadratic(int k, const SrCoeffs &coeffs, const ChannelSetMimo &ch, const SrDesign &design) {
    const auto H = mimo_links(design.theta, ch);
    const Eigen::Index Mt = H[k][k].cols();
    WkQuadratic q{CMat::Zero(Mt, Mt), H[k][k].adjoint() * coeffs.B[k].adjoint()};
    for (int j = 0; j < ch.K(); ++j)
        q.R.noalias() += H[j][k].adjoint() * coeffs.A[j] * H[j][k];
    q.R = 0.5 * (q.R + q.R.adjoint()).eval();
    return q;
}

SrThetaQuadratic build_theta_quadratic(const SrCoeffs &coeffs, const ChannelSetMimo &ch, const SrDesign &design,
                                       double sigma2) {
    const int K = ch.K();
    const Eigen::Index N = ch.N();
    CMat K1 = CMat::Zero(N, N), K2 = CMat::Zero(N, N);
    SrThetaQuadratic q;
    q.Nmat = CMat::Zero(N, N);
    std::vector<CMat> GX(K); // G_j W_j W_j^H
    for (int j = 0; j < K; ++j) {
        const CMat GW = ch.Gt[j] * design.W[j];
        GX[j] = GW * design.W[j].adjoint();
        K2.noalias() += GW * GW.adjoint();
    }
    for (int k = 0; k < K; ++k) {
        const CMat AHr = coeffs.A[k] * ch.Hr[k];
        K1.noalias() += ch.Hr[k].adjoint() * AHr;
        q.Nmat.noalias() += ch.Gt[k] * design.W[k] * coeffs.B[k] * ch.Hr[k];
        for (int j = 0; j < K; ++j)
            q.Nmat.noalias() -= GX[j] * ch.Hd[k][j].adjoint() * AHr;
    }
    q.L = K1.cwiseProduct(K2.transpose());
    q.L = 0.5 * (q.L + q.L.adjoint()).eval();
    q.c0 = 0.0;
    q.c0 = sr_surrogate_value(coeffs, design, ch, sigma2) - sr_theta_quadratic_value(q, design.theta);
    return q;
}

double sr_theta_quadratic_value(const SrThetaQuadratic &q, const CVec &theta) {
    const cd lin = (theta.array() * q.Nmat.diagonal().array()).sum();
    return -theta.dot(q.L * theta).real() + 2.0 * lin.real() + q.c0;
}

LinearizedForm linearize_theta_sr(const SrThetaQuadratic &q, const CVec &ta, double lambda) {
    LinearizedForm f;
    f.b = q.L * ta - lambda * ta - q.Nmat.diagonal().conjugate();
    f.c0 = sr_theta_quadratic_value(q, ta) + 2.0 * ta.dot(f.b).real();
    return f;
}

SrDesign default_sr_init(const SystemConfig &cfg, const ChannelSetMimo &ch, std::uint64_t seed) {
    SrDesign d;
    Philox4x64 rng(seed, make_stream(StreamKind::init, 1));
    d.theta.resize(ch.N());
    for (Eigen::Index n = 0; n < d.theta.size(); ++n)
        d.theta(n) = std::polar(1.0, 2.0 * kPi * rng.uniform());
    const auto alphabet = phase_alphabet(cfg);
    if (!alphabet.empty())
        d.theta = project_phases(d.theta, alphabet);
    const auto H = mimo_links(d.theta, ch);
    const int ds = cfg.num_streams();
    for (int k = 0; k < ch.K(); ++k) {
        Eigen::JacobiSVD<CMat> svd(H[k][k], Eigen::ComputeFullV);
        const CMat V = svd.matrixV().leftCols(ds);
        const Eigen::Index Mt = H[k][k].cols();
        CMat W = std::sqrt(cfg.power_w / ds) * V;
        d.W.push_back(project_power(W, cfg.power_w, power_constraints(cfg, static_cast<int>(Mt), cfg.power_w)));
    }
    return d;
}

SrDesign sr_outer_step(const SystemConfig &cfg, const ChannelSetMimo &ch, const SolverOptions &opts,
                       const SrDesign &x, std::vector<double> *block_objs) {
    SrDesign d = x;
    const double sigma2 = cfg.sigma2();
    auto after_block = [&]() {
        if (!block_objs && !opts.on_block)
            return;
        const double f = sr_objective(d, ch, cfg);
        if (block_objs)
            block_objs->push_back(f);
        if (opts.on_block)
            opts.on_block(f);
    };

    {
        // The surrogate is separable over pairs, so every W_k uses one anchor.
        const SrCoeffs co = compute_sr_coeffs(d, ch, cfg);
        std::vector<CMat> next(ch.K());
        for (int k = 0; k < ch.K(); ++k) {
            const WkQuadratic q = build_wk_quadratic(k, co, ch, d);
            const auto cons = power_constraints(cfg, static_cast<int>(q.R.rows()), cfg.power_w);
            if (opts.w_update == WUpdate::closed_form)
                next[k] = solve_w_closed_form_columns({q.R}, q.Q, d.W[k], cfg.power_w, cons);
            else
                next[k] = cons.empty() ? solve_w_total_power(q.R, q.Q, cfg.power_w)
                                       : solve_w_general_power(q.R, q.Q, cons);
        }
        d.W = std::move(next);
        after_block();
    }

    if (!opts.update_theta || ch.N() == 0)
        return d;
    {
        const SrCoeffs co = compute_sr_coeffs(d, ch, cfg);
        const SrThetaQuadratic q = build_theta_quadratic(co, ch, d, sigma2);
        const auto alphabet = phase_alphabet(cfg);
        if (opts.theta_update == ThetaUpdate::serial) {
            CVec th = d.theta;
            CVec Lth = q.L * th;
            const CVec v = q.Nmat.diagonal();
            std::vector<double> cs, sn;
            for (double a : alphabet) {
                cs.push_back(std::cos(a));
                sn.push_back(std::sin(a));
            }
            for (Eigen::Index j = 0; j < th.size(); ++j) {
                const CVec bj = CVec::Constant(1, Lth(j) - q.L(j, j) * th(j) - std::conj(v(j)));
                const CVec fb = CVec::Constant(1, th(j));
                const cd next = alphabet.empty() ? solve_theta_unimodulus(bj, &fb)(0)
                                                 : solve_theta_discrete(bj, alphabet)(0);
                Lth += q.L.col(j) * (next - th(j));
                th(j) = next;
            }
            d.theta = th;
        } else {
            const double lambda = largest_eigenvalue(q.L).value;
            const LinearizedForm f = linearize_theta_sr(q, d.theta, lambda);
            d.theta = alphabet.empty() ? solve_theta_unimodulus(f.b, &d.theta) : solve_theta_discrete(f.b, alphabet);
        }
        after_block();
    }
    return d;
}

SrResult run_sr_bmm(const SystemConfig &cfg, const ChannelSetMimo &ch, const SolverOptions &opts,
                    const SrDesign &init) {
    if (static_cast<int>(init.W.size()) != ch.K() || init.theta.size() != ch.N())
        throw std::invalid_argument("infeasible initial design: shape");
    for (int k = 0; k < ch.K(); ++k) {
        const auto cons = power_constraints(cfg, static_cast<int>(init.W[k].rows()), cfg.power_w);
        if (init.W[k].rows() != ch.Gt[k].cols() || !power_feasible(init.W[k], cfg.power_w, cons))
            throw std::invalid_argument("infeasible initial design: power of pair " + std::to_string(k));
    }
    if (init.theta.size() && (init.theta.array().abs() - 1.0).abs().maxCoeff() > 1e-9)
        throw std::invalid_argument("infeasible initial design: phases not unit modulus");
    auto objective = [&](const SrDesign &d) { return sr_objective(d, ch, cfg); };

    if (opts.acceleration == Acceleration::squarem) {
        const auto alphabet = phase_alphabet(cfg);
        SolverOptions inner = opts;
        inner.on_block = nullptr;
        const PointMap step = [&](const CVec &v) { return flatten(sr_outer_step(cfg, ch, inner, unflatten(v, init))); };
        const PointMap project = [&](const CVec &v) {
            SrDesign d = unflatten(v, init);
            for (auto &w : d.W)
                w = project_power(w, cfg.power_w, power_constraints(cfg, static_cast<int>(w.rows()), cfg.power_w));
            d.theta = opts.update_theta ? project_phases(d.theta, alphabet) : init.theta;
            return flatten(d);
        };
        const PointObjective obj = [&](const CVec &v) { return objective(unflatten(v, init)); };
        SquaremResult r = squarem_wrap(step, project, obj, flatten(init), opts.max_outer_iters, opts.rel_tol);
        return {unflatten(r.x, init), std::move(r.log)};
    }
    SrResult out{init, {}};
    out.log = detail::bmm_loop(
        out.design, opts,
        [&](const SrDesign &d, std::vector<double> *blocks) { return sr_outer_step(cfg, ch, opts, d, blocks); },
        objective);
    return out;
}

} // namespace rissim
