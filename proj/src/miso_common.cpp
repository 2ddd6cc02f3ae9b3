// SPDX-License-Identifier: Apache-2.0
// Building blocks shared by the weighted sum-rate and max-min solvers.
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rissim/kernels.hpp"
#include "rissim/numerics.hpp"
#include "rissim/wsr.hpp"

namespace rissim {

SinrTerms sinr_terms(const CMat &W, const CMat &H, double sigma2) {
    const CMat A = W.adjoint() * H; // A(j,k) = w_j^H h_k
    const Eigen::Index K = H.cols();
    SinrTerms t{CVec(K), RVec(K), RVec(K)};
    for (Eigen::Index k = 0; k < K; ++k) {
        t.signal(k) = A(k, k);
        t.interference(k) = A.col(k).squaredNorm() - std::norm(A(k, k)) + sigma2;
        t.sinr(k) = std::norm(A(k, k)) / t.interference(k);
    }
    return t;
}

RVec user_weights(const SystemConfig &cfg) {
    RVec w(cfg.K);
    for (int k = 0; k < cfg.K; ++k)
        w(k) = cfg.weight(k);
    return w;
}

double wsr_objective(const CMat &W, const CMat &H, double sigma2, const RVec &weights) {
    const SinrTerms t = sinr_terms(W, H, sigma2);
    double f = 0.0;
    for (Eigen::Index k = 0; k < H.cols(); ++k)
        f += weights(k) * std::log1p(t.sinr(k));
    return f;
}

double sinr_objective(const CMat &W, const CMat &H, double sigma2, const RVec &weights) {
    const SinrTerms t = sinr_terms(W, H, sigma2);
    return weights.dot(t.sinr);
}

double wsr_objective(const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                     const SystemConfig &cfg) {
    return wsr_objective(design.W, effective_channels(design, ch, topo), cfg.sigma2(), user_weights(cfg));
}

double miso_objective(const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                      const SystemConfig &cfg, ObjectiveKind kind) {
    const CMat H = effective_channels(design, ch, topo);
    return kind == ObjectiveKind::rate ? wsr_objective(design.W, H, cfg.sigma2(), user_weights(cfg))
                                       : sinr_objective(design.W, H, cfg.sigma2(), user_weights(cfg));
}

WsrCoeffs compute_wsr_coeffs(const CMat &W, const CMat &H, double sigma2) {
    const SinrTerms t = sinr_terms(W, H, sigma2);
    const Eigen::Index K = H.cols();
    WsrCoeffs c{RVec(K), CVec(K), RVec(K), t.sinr};
    for (Eigen::Index k = 0; k < K; ++k) {
        const double total = t.interference(k) + std::norm(t.signal(k));
        c.alpha(k) = t.sinr(k) / total;
        c.beta(k) = t.signal(k) == cd(0.0) ? cd(0.0) : t.sinr(k) / t.signal(k);
        c.rate(k) = std::log1p(t.sinr(k));
    }
    return c;
}

WsrCoeffs compute_wsr_coeffs(const Design &design, const ChannelSetMiso &ch,
                             const ReflectionTopology &topo, const SystemConfig &cfg) {
    return compute_wsr_coeffs(design.W, effective_channels(design, ch, topo), cfg.sigma2());
}

MisoSurrogate rate_surrogate(const WsrCoeffs &coeffs, const RVec &weights, double sigma2) {
    const Eigen::Index K = coeffs.alpha.size();
    MisoSurrogate s{RMat(K, K), CVec(K), 0.0, true};
    for (Eigen::Index k = 0; k < K; ++k) {
        s.c.row(k).setConstant(weights(k) * coeffs.alpha(k));
        s.lin(k) = weights(k) * coeffs.beta(k);
        s.c0 += weights(k) * (coeffs.rate(k) - coeffs.sinr(k) - coeffs.alpha(k) * sigma2);
    }
    return s;
}

MisoSurrogate sinr_surrogate(const CMat &W, const CMat &H, double sigma2, const RVec &weights) {
    const SinrTerms t = sinr_terms(W, H, sigma2);
    const Eigen::Index K = H.cols();
    MisoSurrogate s{RMat::Zero(K, K), CVec(K), 0.0, false};
    for (Eigen::Index k = 0; k < K; ++k) {
        const SinrMinorizer m = sinr_minorizer(t.signal(k), t.interference(k));
        for (Eigen::Index j = 0; j < K; ++j)
            if (j != k)
                s.c(k, j) = weights(k) * m.a;
        s.lin(k) = weights(k) * std::conj(m.b);
        s.c0 -= weights(k) * m.a * sigma2;
    }
    return s;
}

double surrogate_value(const MisoSurrogate &s, const CMat &W, const CMat &H) {
    const CMat A = W.adjoint() * H;
    double v = s.c0;
    for (Eigen::Index k = 0; k < H.cols(); ++k) {
        for (Eigen::Index j = 0; j < H.cols(); ++j)
            v -= s.c(k, j) * std::norm(A(j, k));
        v += 2.0 * std::real(s.lin(k) * A(k, k));
    }
    return v;
}

WQuadratic build_w_quadratic(const WsrCoeffs &coeffs, const CMat &H, const RVec &weights) {
    const Eigen::Index M = H.rows(), K = H.cols();
    WQuadratic q{CMat::Zero(M, M), CMat(M, K)};
    for (Eigen::Index k = 0; k < K; ++k) {
        q.R.noalias() += (weights(k) * coeffs.alpha(k)) * H.col(k) * H.col(k).adjoint();
        q.Q.col(k) = (weights(k) * coeffs.beta(k)) * H.col(k);
    }
    q.R = 0.5 * (q.R + q.R.adjoint()).eval();
    return q;
}

std::vector<CMat> column_quadratics(const MisoSurrogate &s, const CMat &H) {
    const Eigen::Index M = H.rows(), K = H.cols();
    const Eigen::Index count = s.shared ? 1 : K;
    std::vector<CMat> R(count, CMat::Zero(M, M));
    for (Eigen::Index j = 0; j < count; ++j) {
        for (Eigen::Index k = 0; k < K; ++k)
            if (s.c(k, j) != 0.0)
                R[j].noalias() += s.c(k, j) * H.col(k) * H.col(k).adjoint();
        R[j] = 0.5 * (R[j] + R[j].adjoint()).eval();
    }
    return R;
}

namespace {

struct ColumnEig {
    EigenDecomposition eig;
    CMat Z; // V^H q
};

// Minimum-norm solution of R w = q when consistent; false otherwise.
bool pseudo_solve(const EigenDecomposition &e, const CMat &Z, double qnorm, CMat &Y) {
    const double top = e.lambda.size() ? e.lambda(0) : 0.0;
    const double thr = 1e-12 * top;
    Y = CMat::Zero(Z.rows(), Z.cols());
    for (Eigen::Index n = 0; n < Z.rows(); ++n) {
        if (e.lambda(n) > thr && e.lambda(n) > 0.0)
            Y.row(n) = Z.row(n) / e.lambda(n);
        else if (Z.row(n).norm() > 1e-12 * qnorm)
            return false;
    }
    return true;
}

} // namespace

CMat solve_w_total_power(const CMat &R, const CMat &Q, double P) {
    return solve_w_columns_total({R}, Q, P);
}

CMat solve_w_columns_total(const std::vector<CMat> &R, const CMat &Q, double P) {
    if (!(P > 0.0))
        throw std::invalid_argument("solve_w_total_power: power must be positive");
    const Eigen::Index M = Q.rows(), K = Q.cols();
    const double qnorm = Q.norm();
    if (qnorm == 0.0)
        return CMat::Zero(M, K);
    const bool shared = R.size() == 1;
    if (!shared && static_cast<Eigen::Index>(R.size()) != K)
        throw std::invalid_argument("solve_w_total_power: need one quadratic per column");

    std::vector<ColumnEig> parts;
    if (shared) {
        parts.push_back({hermitian_eig(R[0]), CMat()});
        parts[0].Z = parts[0].eig.V.adjoint() * Q;
    } else {
        for (Eigen::Index j = 0; j < K; ++j) {
            parts.push_back({hermitian_eig(R[j]), CMat()});
            parts.back().Z = parts.back().eig.V.adjoint() * Q.col(j);
        }
    }

    // Interior candidate.
    bool consistent = true;
    CMat W(M, K);
    for (std::size_t t = 0; t < parts.size() && consistent; ++t) {
        CMat Y;
        consistent = pseudo_solve(parts[t].eig, parts[t].Z, qnorm, Y);
        if (consistent) {
            if (shared)
                W = parts[t].eig.V * Y;
            else
                W.col(static_cast<Eigen::Index>(t)) = parts[t].eig.V * Y;
        }
    }
    if (consistent && W.squaredNorm() <= P)
        return W;

    std::vector<RVec> z, lam;
    for (const auto &p : parts) {
        z.push_back(p.Z.rowwise().squaredNorm());
        lam.push_back(p.eig.lambda);
    }
    const double gamma = solve_power_multiplier_terms(z, lam, P);
    for (std::size_t t = 0; t < parts.size(); ++t) {
        const RVec inv = (parts[t].eig.lambda.array() + gamma).inverse();
        const CMat Y = inv.asDiagonal() * parts[t].Z;
        if (shared)
            W = parts[t].eig.V * Y;
        else
            W.col(static_cast<Eigen::Index>(t)) = parts[t].eig.V * Y;
    }
    return W;
}

namespace {

bool row_selector(const PowerConstraint &c, Eigen::Index &row) {
    Eigen::Index found = -1;
    for (Eigen::Index i = 0; i < c.omega.rows(); ++i)
        for (Eigen::Index j = 0; j < c.omega.cols(); ++j) {
            const cd v = c.omega(i, j);
            if (v == cd(0.0))
                continue;
            if (i != j || v != cd(1.0) || found >= 0)
                return false;
            found = i;
        }
    row = found;
    return found >= 0;
}

double constraint_power(const CMat &W, const PowerConstraint &c) {
    return (W.adjoint() * c.omega * W).trace().real();
}

} // namespace

bool power_feasible(const CMat &W, double P, const std::vector<PowerConstraint> &constraints,
                    double rel_tol) {
    if (constraints.empty())
        return W.squaredNorm() <= P * (1.0 + rel_tol);
    for (const auto &c : constraints)
        if (constraint_power(W, c) > c.power_w * (1.0 + rel_tol))
            return false;
    return true;
}

CMat project_power(const CMat &W, double P, const std::vector<PowerConstraint> &constraints) {
    if (constraints.empty()) {
        const double p = W.squaredNorm();
        return p > P ? CMat(W * std::sqrt(P / p)) : W;
    }
    bool rows = true;
    std::vector<Eigen::Index> sel(constraints.size());
    for (std::size_t i = 0; i < constraints.size() && rows; ++i)
        rows = row_selector(constraints[i], sel[i]);
    CMat out = W;
    if (rows) {
        for (std::size_t i = 0; i < constraints.size(); ++i) {
            const double p = out.row(sel[i]).squaredNorm();
            if (p > constraints[i].power_w)
                out.row(sel[i]) *= std::sqrt(constraints[i].power_w / p);
        }
        return out;
    }
    double scale = 1.0;
    for (const auto &c : constraints) {
        const double p = constraint_power(W, c);
        if (p > c.power_w)
            scale = std::min(scale, std::sqrt(c.power_w / p));
    }
    return W * scale;
}

namespace {

// Beamformers for multipliers gamma; false if some R_j + sum gamma Omega is singular.
bool general_w(const std::vector<CMat> &R, const CMat &Q, const std::vector<PowerConstraint> &cons,
               const RVec &gamma, CMat &W) {
    const Eigen::Index M = Q.rows(), K = Q.cols();
    CMat S = CMat::Zero(M, M);
    for (std::size_t i = 0; i < cons.size(); ++i)
        if (gamma(static_cast<Eigen::Index>(i)) != 0.0)
            S += gamma(static_cast<Eigen::Index>(i)) * cons[i].omega;
    W.resize(M, K);
    const double scale = std::max(1e-300, S.norm() + R[0].norm());
    for (std::size_t t = 0; t < R.size(); ++t) {
        const CMat A = R[t] + S;
        Eigen::LDLT<CMat> ldlt(A);
        if (ldlt.info() != Eigen::Success)
            return false;
        const RVec d = ldlt.vectorD().real();
        if (d.minCoeff() <= 1e-14 * scale)
            return false;
        if (R.size() == 1)
            W = ldlt.solve(Q);
        else
            W.col(static_cast<Eigen::Index>(t)) = ldlt.solve(Q.col(static_cast<Eigen::Index>(t)));
    }
    return true;
}

double power_at(const std::vector<CMat> &R, const CMat &Q, const std::vector<PowerConstraint> &cons,
                RVec gamma, std::size_t i, double x) {
    gamma(static_cast<Eigen::Index>(i)) = x;
    CMat W;
    if (!general_w(R, Q, cons, gamma, W))
        return std::numeric_limits<double>::infinity();
    return constraint_power(W, cons[i]);
}

// Smallest x >= 0 with p_i(x) <= P_i, where p_i is decreasing in x.
double coordinate_root(const std::vector<CMat> &R, const CMat &Q, const std::vector<PowerConstraint> &cons,
                       const RVec &gamma, std::size_t i) {
    const double Pi = cons[i].power_w;
    const double p0 = power_at(R, Q, cons, gamma, i, 0.0);
    if (p0 <= Pi)
        return 0.0;
    double lo = 0.0, flo = p0;
    double hi = std::max(gamma(static_cast<Eigen::Index>(i)), 1e-12 * (R[0].norm() + cons[i].omega.norm()));
    if (hi <= 0.0)
        hi = 1e-300;
    double fhi = power_at(R, Q, cons, gamma, i, hi);
    for (int it = 0; fhi > Pi; ++it) {
        if (it > 2000)
            throw std::runtime_error("solve_w_general_power: cannot bracket multiplier");
        lo = hi;
        flo = fhi;
        hi *= 4.0;
        fhi = power_at(R, Q, cons, gamma, i, hi);
    }
    // Illinois regula falsi on phi = 1/sqrt(p) - 1/sqrt(P_i).
    auto phi = [&](double p) { return (std::isfinite(p) ? 1.0 / std::sqrt(p) : 0.0) - 1.0 / std::sqrt(Pi); };
    double a = lo, fa = phi(flo), b = hi, fb = phi(fhi);
    int side = 0;
    for (int it = 0; it < 200; ++it) {
        double x = (fa != fb) ? b - fb * (b - a) / (fb - fa) : 0.5 * (a + b);
        if (!(x > a && x < b))
            x = 0.5 * (a + b);
        const double px = power_at(R, Q, cons, gamma, i, x);
        const double fx = phi(px);
        if (std::isfinite(px) && std::abs(px - Pi) <= 1e-13 * Pi)
            return x;
        if (fx > 0.0) { // feasible side
            b = x;
            fb = fx;
            if (side == 1)
                fa *= 0.5;
            side = 1;
        } else {
            a = x;
            fa = fx;
            if (side == -1)
                fb *= 0.5;
            side = -1;
        }
        if (b - a <= 1e-15 * b)
            break;
    }
    return b;
}

} // namespace

CMat solve_w_general_power(const CMat &R, const CMat &Q, const std::vector<PowerConstraint> &constraints) {
    return solve_w_columns_general({R}, Q, constraints);
}

CMat solve_w_columns_general(const std::vector<CMat> &R, const CMat &Q,
                             const std::vector<PowerConstraint> &cons) {
    if (cons.empty())
        throw std::invalid_argument("solve_w_general_power: no constraints");
    const Eigen::Index M = Q.rows(), K = Q.cols();
    for (const auto &c : cons)
        if (c.omega.rows() != M || !(c.power_w > 0.0))
            throw std::invalid_argument("solve_w_general_power: bad constraint");
    if (Q.norm() == 0.0)
        return CMat::Zero(M, K);

    // Interior candidate through the pseudo-inverse.
    {
        bool consistent = true;
        CMat W(M, K);
        for (std::size_t t = 0; t < R.size() && consistent; ++t) {
            const EigenDecomposition e = hermitian_eig(R[t]);
            const CMat q = R.size() == 1 ? Q : CMat(Q.col(static_cast<Eigen::Index>(t)));
            CMat Y;
            consistent = pseudo_solve(e, e.V.adjoint() * q, Q.norm(), Y);
            if (consistent) {
                if (R.size() == 1)
                    W = e.V * Y;
                else
                    W.col(static_cast<Eigen::Index>(t)) = e.V * Y;
            }
        }
        if (consistent && power_feasible(W, 0.0, cons, 0.0))
            return W;
    }

    // Dual coordinate ascent: each multiplier in turn makes its constraint
    // tight (or zero) with the others held fixed.
    const Eigen::Index J = static_cast<Eigen::Index>(cons.size());
    RVec gamma = RVec::Zero(J);
    CMat W;
    if (!general_w(R, Q, cons, gamma, W)) {
        // Singular quadratic: a single coordinate cannot reach a finite
        // power, so start from a uniform multiplier that meets every budget.
        double scale = 0.0;
        for (const auto &c : cons)
            scale = std::max(scale, c.omega.norm());
        for (const auto &r : R)
            scale = std::max(scale, r.norm());
        double t = 1e-8 * scale;
        for (int it = 0;; ++it) {
            if (it > 400)
                throw std::runtime_error("solve_w_general_power: no finite dual starting point");
            gamma.setConstant(t);
            bool ok = general_w(R, Q, cons, gamma, W);
            for (Eigen::Index i = 0; ok && i < J; ++i)
                ok = constraint_power(W, cons[i]) <= cons[i].power_w;
            if (ok)
                break;
            t *= 4.0;
        }
    }
    double worst = 0.0;
    for (int sweep = 0; sweep < 2000; ++sweep) {
        for (Eigen::Index i = 0; i < J; ++i)
            gamma(i) = coordinate_root(R, Q, cons, gamma, static_cast<std::size_t>(i));
        if (!general_w(R, Q, cons, gamma, W))
            continue;
        worst = 0.0;
        for (Eigen::Index i = 0; i < J; ++i) {
            const double ratio = constraint_power(W, cons[i]) / cons[i].power_w - 1.0;
            worst = std::max(worst, ratio);
            if (gamma(i) > 0.0)
                worst = std::max(worst, std::abs(ratio) * 1e-2);
        }
        // Feasibility to 1e-9 relative, slackness to 1e-7 relative.
        if (worst <= 1e-9)
            return project_power(W, 0.0, cons);
    }
    std::ostringstream os;
    os << "solve_w_general_power: dual coordinate ascent did not converge (worst residual " << worst
       << ", multipliers " << gamma.transpose() << ")";
    throw std::runtime_error(os.str());
}

CMat solve_w_closed_form(const CMat &R, const CMat &Q, const WsrCoeffs &coeffs, const CMat &W_anchor,
                         const CMat &H, const RVec &weights, double P) {
    double c_sigma = 0.0;
    for (Eigen::Index k = 0; k < H.cols(); ++k)
        c_sigma += weights(k) * coeffs.alpha(k) * H.col(k).squaredNorm();
    if (c_sigma <= 0.0)
        return W_anchor;
    const Eigen::Index M = R.rows();
    const CMat Pi = (Q - (R - c_sigma * CMat::Identity(M, M)) * W_anchor) / c_sigma;
    const double p = Pi.squaredNorm();
    return p <= P ? Pi : CMat(std::sqrt(P / p) * Pi);
}

CMat solve_w_closed_form_columns(const std::vector<CMat> &R, const CMat &Q, const CMat &W_anchor,
                                 double P, const std::vector<PowerConstraint> &constraints) {
    double c = 0.0;
    for (const auto &r : R)
        c = std::max(c, r.trace().real());
    if (c <= 0.0)
        return W_anchor;
    const Eigen::Index M = Q.rows(), K = Q.cols();
    CMat Pi(M, K);
    for (Eigen::Index j = 0; j < K; ++j) {
        const CMat &Rj = R.size() == 1 ? R[0] : R[static_cast<std::size_t>(j)];
        Pi.col(j) = (Q.col(j) - (Rj * W_anchor.col(j) - c * W_anchor.col(j))) / c;
    }
    if (!constraints.empty()) {
        for (const auto &cn : constraints) {
            Eigen::Index row;
            if (!row_selector(cn, row))
                throw std::invalid_argument("closed-form update supports total or per-antenna power only");
        }
    }
    return project_power(Pi, P, constraints);
}

CVec solve_theta_unimodulus(const CVec &b, const CVec *fallback) {
    CVec out(b.size());
    kernels::align_phases(b.data(), fallback ? fallback->data() : nullptr, out.data(),
                          static_cast<std::size_t>(b.size()));
    return out;
}

namespace {

void alphabet_tables(const std::vector<double> &alphabet, std::vector<double> &c, std::vector<double> &s) {
    c.resize(alphabet.size());
    s.resize(alphabet.size());
    for (std::size_t q = 0; q < alphabet.size(); ++q) {
        c[q] = std::cos(alphabet[q]);
        s[q] = std::sin(alphabet[q]);
        // Exact values on the axes keep ties exact.
        for (double *v : {&c[q], &s[q]}) {
            if (std::abs(*v) < 1e-15)
                *v = 0.0;
            else if (std::abs(std::abs(*v) - 1.0) < 1e-15)
                *v = std::copysign(1.0, *v);
        }
    }
}

} // namespace

CVec solve_theta_discrete(const CVec &b, const std::vector<double> &alphabet) {
    if (alphabet.empty())
        throw std::invalid_argument("solve_theta_discrete: empty alphabet");
    std::vector<double> sorted = alphabet;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> c, s;
    alphabet_tables(sorted, c, s);
    CVec out(b.size());
    kernels::project_discrete(b.data(), c.data(), s.data(), c.size(), out.data(),
                              static_cast<std::size_t>(b.size()));
    return out;
}

CVec project_phases(const CVec &theta, const std::vector<double> &alphabet) {
    const CVec neg = -theta;
    return alphabet.empty() ? solve_theta_unimodulus(neg) : solve_theta_discrete(neg, alphabet);
}

ThetaSurrogate theta_surrogate(int l, const Design &design, const MisoSurrogate &s,
                               const ChannelSetMiso &ch, const ReflectionTopology &topo) {
    const int K = ch.K();
    const CVec &th = design.theta[l - 1];
    const Eigen::Index N = th.size();
    ThetaSurrogate ts;
    ts.c = CVec::Zero(N);
    ts.F_stack.resize(N, 0);
    std::vector<CVec> cols;
    for (int k = 0; k < K; ++k) {
        if (!user_uses_ris(k, l, topo))
            continue;
        const AffineChannel a = reflect_channel_matrix(k, l, design, ch, topo);
        const CMat U = a.F.adjoint() * design.W;           // column j: F_k^H w_j
        const CVec e = design.W.adjoint() * a.rest;        // e_j = w_j^H d_k
        ts.c += std::conj(s.lin(k)) * U.col(k);
        for (int j = 0; j < K; ++j) {
            const double ckj = s.c(k, j);
            if (ckj == 0.0)
                continue;
            ts.c -= (ckj * e(j)) * U.col(j);
            cols.push_back(std::sqrt(ckj) * U.col(j));
        }
    }
    ts.F_stack.resize(N, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
        ts.F_stack.col(static_cast<Eigen::Index>(i)) = cols[i];
    ts.lambda = ts.F_stack.squaredNorm();
    const CVec Lth = ts.F_stack * (ts.F_stack.adjoint() * th);
    ts.b = -ts.c + Lth - ts.lambda * th;
    const double anchor = surrogate_value(s, design.W, effective_channels(design, ch, topo));
    ts.c0 = anchor + 2.0 * th.dot(ts.b).real();
    return ts;
}

double theta_quadratic_value(const ThetaSurrogate &ts, const CVec &ta, double anchor_value, const CVec &theta) {
    auto quad = [&](const CVec &t) {
        const CVec u = ts.F_stack.adjoint() * t;
        return -u.squaredNorm() + 2.0 * t.dot(ts.c).real();
    };
    return quad(theta) - quad(ta) + anchor_value;
}

LinearizedForm build_theta_linear(int l, const Design &design, const WsrCoeffs &coeffs,
                                  const ChannelSetMiso &ch, const ReflectionTopology &topo,
                                  const SystemConfig &cfg) {
    const MisoSurrogate s = rate_surrogate(coeffs, user_weights(cfg), cfg.sigma2());
    const ThetaSurrogate ts = theta_surrogate(l, design, s, ch, topo);
    return {ts.b, ts.c0};
}

CVec update_theta_serial(int l, const Design &design, const MisoSurrogate &s, const ChannelSetMiso &ch,
                         const ReflectionTopology &topo, const std::vector<double> &alphabet) {
    const ThetaSurrogate ts = theta_surrogate(l, design, s, ch, topo);
    const CMat L = ts.F_stack * ts.F_stack.adjoint();
    CVec th = design.theta[l - 1];
    CVec Lth = L * th;
    std::vector<double> cs, sn;
    if (!alphabet.empty()) {
        std::vector<double> sorted = alphabet;
        std::sort(sorted.begin(), sorted.end());
        alphabet_tables(sorted, cs, sn);
    }
    for (Eigen::Index j = 0; j < th.size(); ++j) {
        // Coefficient of conj(theta_j) with the other entries at their current values.
        const cd bj = -ts.c(j) + Lth(j) - L(j, j) * th(j);
        cd next;
        if (alphabet.empty())
            kernels::align_phases(&bj, &th(j), &next, 1);
        else
            kernels::project_discrete(&bj, cs.data(), sn.data(), cs.size(), &next, 1);
        if (bj == cd(0.0) && alphabet.empty())
            next = th(j);
        const cd delta = next - th(j);
        if (delta != cd(0.0)) {
            Lth += L.col(j) * delta;
            th(j) = next;
        }
    }
    return th;
}

CVec update_theta_serial(int l, const Design &design, const WsrCoeffs &coeffs, const ChannelSetMiso &ch,
                         const ReflectionTopology &topo, const SystemConfig &cfg) {
    const MisoSurrogate s = rate_surrogate(coeffs, user_weights(cfg), cfg.sigma2());
    return update_theta_serial(l, design, s, ch, topo, phase_alphabet(cfg));
}

Design default_init(const SystemConfig &cfg, const ChannelSetMiso &ch, std::uint64_t seed) {
    const int M = ch.M(), K = ch.K();
    Design d;
    d.W = CMat::Zero(M, K);
    const double amp = std::sqrt(cfg.power_w / K);
    for (int k = 0; k < K; ++k) {
        const double n = ch.hd[k].norm();
        if (n > 0.0)
            d.W.col(k) = amp * ch.hd[k] / n;
        else
            d.W(0, k) = amp;
    }
    d.W = project_power(d.W, cfg.power_w, power_constraints(cfg, M, cfg.power_w));
    const auto alphabet = phase_alphabet(cfg);
    for (int l = 0; l < ch.L(); ++l) {
        Philox4x64 rng(seed, make_stream(StreamKind::init, static_cast<std::uint64_t>(l + 1)));
        CVec th(ch.G0[l].rows());
        for (Eigen::Index n = 0; n < th.size(); ++n)
            th(n) = std::polar(1.0, 2.0 * kPi * rng.uniform());
        d.theta.push_back(alphabet.empty() ? th : project_phases(th, alphabet));
    }
    return d;
}

} // namespace rissim
