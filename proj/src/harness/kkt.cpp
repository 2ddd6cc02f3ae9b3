// SPDX-License-Identifier: Apache-2.0
#include "rissim/harness/kkt.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rissim/mr.hpp"
#include "rissim/sr.hpp"
#include "rissim/wsr.hpp"

namespace rissim {

MisoGradient rate_gradient(int k, const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                           const SystemConfig &cfg) {
    const CMat H = effective_channels(design, ch, topo);
    const CMat &W = design.W;
    const CVec hk = H.col(k);
    const CVec a = W.adjoint() * hk; // a_j = w_j^H h_k
    const double total = a.squaredNorm() + cfg.sigma2();
    const double interf = total - std::norm(a(k));
    RVec coef(W.cols());
    for (Eigen::Index j = 0; j < W.cols(); ++j)
        coef(j) = 1.0 / total - (j == k ? 0.0 : 1.0 / interf);

    MisoGradient g;
    g.W.resize(W.rows(), W.cols());
    for (Eigen::Index j = 0; j < W.cols(); ++j)
        g.W.col(j) = 2.0 * coef(j) * hk * std::conj(a(j));
    for (int l = 1; l <= ch.L(); ++l) {
        if (!user_uses_ris(k, l, topo)) {
            g.theta.push_back(CVec::Zero(design.theta[l - 1].size()));
            continue;
        }
        const AffineChannel f = reflect_channel_matrix(k, l, design, ch, topo);
        const CMat U = f.F.adjoint() * W; // column j: F^H w_j
        CVec gt = CVec::Zero(U.rows());
        for (Eigen::Index j = 0; j < W.cols(); ++j)
            gt += 2.0 * coef(j) * a(j) * U.col(j);
        g.theta.push_back(gt);
    }
    return g;
}

SrGradient sr_gradient(const SrDesign &design, const ChannelSetMimo &ch, const SystemConfig &cfg) {
    const int K = ch.K();
    const auto H = mimo_links(design.theta, ch);
    std::vector<CMat> Cinv(K), Tinv(K), X(K);
    for (int j = 0; j < K; ++j)
        X[j] = design.W[j] * design.W[j].adjoint();
    for (int k = 0; k < K; ++k) {
        const CMat T = interference_covariance(k, design, H, cfg.sigma2());
        const CMat S = H[k][k] * design.W[k];
        const CMat C = T + S * S.adjoint();
        Tinv[k] = T.llt().solve(CMat::Identity(T.rows(), T.cols()));
        Cinv[k] = C.llt().solve(CMat::Identity(C.rows(), C.cols()));
    }
    SrGradient g;
    CVec D = CVec::Zero(ch.N());
    for (int j = 0; j < K; ++j) {
        CMat gw = CMat::Zero(design.W[j].rows(), design.W[j].cols());
        for (int k = 0; k < K; ++k) {
            const CMat M = j == k ? Cinv[k] : CMat(Cinv[k] - Tinv[k]);
            gw += 2.0 * H[k][j].adjoint() * M * H[k][j] * design.W[j];
            if (ch.N() > 0)
                D += (ch.Gt[j] * X[j] * H[k][j].adjoint() * M * ch.Hr[k]).diagonal();
        }
        g.W.push_back(gw);
    }
    g.theta = 2.0 * D.conjugate();
    return g;
}

namespace {

// Active pieces of the power set at W: each is a mask on W's entries whose
// energy is at its budget.
struct NormalGenerators {
    std::vector<CMat> dirs; // in scaled coordinates
};

NormalGenerators power_normals(const CMat &Ws, const SystemConfig &cfg) {
    NormalGenerators n;
    const double rel = 1e-6;
    if (cfg.power_model == PowerModel::total) {
        if (Ws.squaredNorm() >= (1.0 - rel))
            n.dirs.push_back(Ws);
    } else if (cfg.power_model == PowerModel::per_antenna) {
        const double Pm = 1.0 / Ws.rows(); // scaled budget P/M divided by P
        for (Eigen::Index m = 0; m < Ws.rows(); ++m)
            if (Ws.row(m).squaredNorm() >= Pm * (1.0 - rel)) {
                CMat d = CMat::Zero(Ws.rows(), Ws.cols());
                d.row(m) = Ws.row(m);
                n.dirs.push_back(d);
            }
    } else {
        throw std::invalid_argument("kkt_residual supports total or per-antenna power");
    }
    return n;
}

// Orthogonal generators: project g onto the tangent cone in closed form.
void project_tangent(CMat &g, const NormalGenerators &n) {
    for (const auto &d : n.dirs) {
        const double dd = d.squaredNorm();
        if (dd == 0.0)
            continue;
        const double r = (d.conjugate().cwiseProduct(g)).sum().real() / dd;
        if (r > 0.0)
            g -= r * d;
    }
}

void project_phase_tangent(CVec &g, const CVec &theta) {
    for (Eigen::Index n = 0; n < g.size(); ++n)
        g(n) -= (std::conj(theta(n)) * g(n)).real() * theta(n);
}

RVec to_real(const CMat &W, const std::vector<CVec> &theta) {
    Eigen::Index n = W.size();
    for (const auto &t : theta)
        n += t.size();
    RVec v(2 * n);
    Eigen::Index o = 0;
    auto put = [&](cd z) {
        v(o++) = z.real();
        v(o++) = z.imag();
    };
    for (Eigen::Index i = 0; i < W.size(); ++i)
        put(W.data()[i]);
    for (const auto &t : theta)
        for (Eigen::Index i = 0; i < t.size(); ++i)
            put(t(i));
    return v;
}

} // namespace

double kkt_residual(const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                    const SystemConfig &cfg, ProblemKind kind, double active_tol) {
    if (kind == ProblemKind::sr)
        throw std::invalid_argument("kkt_residual: use the MIMO overload for sum-rate designs");
    const double sp = std::sqrt(cfg.power_w);
    const CMat Ws = design.W / sp;
    const NormalGenerators normals = power_normals(Ws, cfg);

    auto scaled = [&](MisoGradient g) {
        g.W *= sp;
        for (std::size_t l = 0; l < g.theta.size(); ++l)
            project_phase_tangent(g.theta[l], design.theta[l]);
        return g;
    };

    if (kind == ProblemKind::wsr) {
        MisoGradient total{CMat::Zero(Ws.rows(), Ws.cols()), {}};
        for (const auto &t : design.theta)
            total.theta.push_back(CVec::Zero(t.size()));
        for (int k = 0; k < ch.K(); ++k) {
            const MisoGradient g = rate_gradient(k, design, ch, topo, cfg);
            total.W += cfg.weight(k) * g.W;
            for (std::size_t l = 0; l < g.theta.size(); ++l)
                total.theta[l] += cfg.weight(k) * g.theta[l];
        }
        MisoGradient p = scaled(total);
        project_tangent(p.W, normals);
        return to_real(p.W, p.theta).norm();
    }

    // Max-min: smallest distance from conv{active gradients} to the normal
    // cone, by enumerating supports of the convex weights and multipliers.
    const RVec rates = user_rates(design, ch, topo, cfg);
    const double rmin = rates.minCoeff();
    std::vector<RVec> cols;
    for (int k = 0; k < ch.K(); ++k)
        if (rates(k) <= rmin + active_tol * std::max(1.0, std::abs(rmin)))
        {
            const MisoGradient g = scaled(rate_gradient(k, design, ch, topo, cfg));
            cols.push_back(to_real(g.W, g.theta));
        }
    std::vector<RVec> gens;
    for (const auto &d : normals.dirs) {
        std::vector<CVec> zeros;
        for (const auto &t : design.theta)
            zeros.push_back(CVec::Zero(t.size()));
        gens.push_back(to_real(d, zeros));
    }
    const int U = static_cast<int>(cols.size()), J = static_cast<int>(gens.size());
    if (U + J > 14)
        throw std::invalid_argument("kkt_residual: too many active pieces for exact evaluation");
    double best = std::numeric_limits<double>::infinity();
    for (int su = 1; su < (1 << U); ++su)
        for (int sj = 0; sj < (1 << J); ++sj) {
            std::vector<RVec> A;
            int nl = 0;
            for (int u = 0; u < U; ++u)
                if (su & (1 << u)) {
                    A.push_back(cols[u]);
                    ++nl;
                }
            for (int j = 0; j < J; ++j)
                if (sj & (1 << j))
                    A.push_back(-gens[j]);
            const int n = static_cast<int>(A.size());
            RMat Am(cols[0].size(), n);
            for (int i = 0; i < n; ++i)
                Am.col(i) = A[i];
            RMat sys = RMat::Zero(n + 1, n + 1);
            sys.topLeftCorner(n, n) = Am.transpose() * Am;
            for (int i = 0; i < nl; ++i)
                sys(i, n) = sys(n, i) = 1.0;
            RVec rhs = RVec::Zero(n + 1);
            rhs(n) = 1.0;
            const RVec z = sys.completeOrthogonalDecomposition().solve(rhs);
            if ((sys * z - rhs).norm() > 1e-8 * std::max(1.0, sys.norm()))
                continue;
            const RVec x = z.head(n);
            if (x.minCoeff() < -1e-10)
                continue;
            best = std::min(best, (Am * x.cwiseMax(0.0)).norm());
        }
    return best;
}

double kkt_residual(const SrDesign &design, const ChannelSetMimo &ch, const SystemConfig &cfg) {
    SrGradient g = sr_gradient(design, ch, cfg);
    const double sp = std::sqrt(cfg.power_w);
    double sq = 0.0;
    for (std::size_t k = 0; k < g.W.size(); ++k) {
        CMat gw = g.W[k] * sp;
        project_tangent(gw, power_normals(design.W[k] / sp, cfg));
        sq += gw.squaredNorm();
    }
    project_phase_tangent(g.theta, design.theta);
    sq += g.theta.squaredNorm();
    return std::sqrt(sq);
}

} // namespace rissim
