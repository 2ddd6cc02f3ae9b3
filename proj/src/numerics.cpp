// SPDX-License-Identifier: Apache-2.0
#include "rissim/numerics.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rissim {

EigenDecomposition hermitian_eig(const CMat &A) {
    if (A.rows() != A.cols())
        throw std::invalid_argument("hermitian_eig: matrix is not square");
    const double scale = std::max(1.0, A.norm());
    if ((A - A.adjoint()).norm() > 1e-10 * scale)
        throw std::invalid_argument("hermitian_eig: not Hermitian");

    const CMat As = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(As);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: eigensolver failed");

    // Eigen returns ascending order; flip to descending.
    const Eigen::Index n = A.rows();
    EigenDecomposition out;
    out.V = es.eigenvectors().rowwise().reverse();
    out.lambda = es.eigenvalues().reverse();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (out.lambda(i) < 0.0) {
            if (out.lambda(i) < -1e-10 * scale)
                throw std::invalid_argument("hermitian_eig: matrix is not positive semidefinite");
            out.lambda(i) = 0.0;
        }
    }
    return out;
}

EigenvalueEstimate largest_eigenvalue(const CMat &A, double tol) {
    const Eigen::Index n = A.rows();
    EigenvalueEstimate est;
    const double tr = A.diagonal().real().sum();
    if (n == 0)
        return est;
    if (n == 1) {
        est.value = std::max(0.0, A(0, 0).real());
        return est;
    }
    if (tr <= 0.0)
        return est;

    // Deterministic start with distinct entries so it is not orthogonal to
    // structured eigenvectors such as the all-ones vector's complement.
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = cd(1.0 + 0.5 * std::sin(1.0 + i), 0.25 * std::cos(2.0 + 3.0 * i));
    v.normalize();

    CVec Av = A * v;
    double mu = v.dot(Av).real();
    for (int it = 1; it <= 500; ++it) {
        const double nrm = Av.norm();
        if (nrm == 0.0)
            break;
        v = Av / nrm;
        Av = A * v;
        mu = v.dot(Av).real();
        const double res = (Av - mu * v).norm();
        est.iterations = it;
        if (res <= tol * std::max(1.0, std::abs(mu)) || res <= 1e-15 * tr) {
            est.value = std::min(mu + res, tr);
            return est;
        }
    }
    est.value = tr;
    est.fallback = true;
    return est;
}

namespace {

RVec projected_energy(const EigenDecomposition &eig, const CMat &Q) {
    const CMat Z = eig.V.adjoint() * Q;
    return Z.rowwise().squaredNorm();
}

double secular(const std::vector<RVec> &z, const std::vector<RVec> &lambda, double gamma,
               double *deriv) {
    double f = 0.0, df = 0.0;
    for (std::size_t t = 0; t < z.size(); ++t)
        for (Eigen::Index n = 0; n < z[t].size(); ++n) {
            if (z[t](n) == 0.0)
                continue;
            const double den = lambda[t](n) + gamma;
            if (den <= 0.0) {
                if (deriv)
                    *deriv = -std::numeric_limits<double>::infinity();
                return std::numeric_limits<double>::infinity();
            }
            f += z[t](n) / (den * den);
            df += -2.0 * z[t](n) / (den * den * den);
        }
    if (deriv)
        *deriv = df;
    return f;
}

} // namespace

double secular_function(const EigenDecomposition &eig, const CMat &Q, double gamma) {
    return secular({projected_energy(eig, Q)}, {eig.lambda}, gamma, nullptr);
}

double solve_power_multiplier(const EigenDecomposition &eig, const CMat &Q, double P) {
    return solve_power_multiplier_terms({projected_energy(eig, Q)}, {eig.lambda}, P);
}

double solve_power_multiplier_terms(const std::vector<RVec> &z, const std::vector<RVec> &lambda, double P) {
    if (!(P > 0.0))
        throw std::invalid_argument("solve_power_multiplier: power must be positive");
    double q2 = 0.0;
    for (const auto &zt : z)
        q2 += zt.sum();
    assert(q2 > 0.0);

    // f(gamma) <= ||Q||_F^2 / gamma^2, so f(hi) <= P.
    double lo = 0.0, hi = std::sqrt(q2 / P);
    if (secular(z, lambda, lo, nullptr) <= P)
        return 0.0;

    // Safeguarded Newton on phi(g) = 1/sqrt(f(g)) - 1/sqrt(P), which is close
    // to linear in g; bisection whenever the step leaves the bracket.
    double g = hi;
    const double target = 1.0 / std::sqrt(P);
    for (int it = 0; it < 200; ++it) {
        double df = 0.0;
        const double f = secular(z, lambda, g, &df);
        if (std::abs(f - P) <= 1e-13 * P)
            return g;
        if (f > P)
            lo = g;
        else
            hi = g;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            return hi;

        double next = 0.5 * (lo + hi);
        if (std::isfinite(f) && f > 0.0 && df < 0.0) {
            const double phi = 1.0 / std::sqrt(f) - target;
            const double dphi = -0.5 * df / (f * std::sqrt(f));
            const double cand = g - phi / dphi;
            if (cand > lo && cand < hi)
                next = cand;
        }
        g = next;
    }
    return g;
}

double logdet_hpd(const CMat &A) {
    Eigen::LLT<CMat> llt(A);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("logdet_hpd: matrix is not positive definite");
    const CMat &L = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        s += std::log(L(i, i).real());
    return 2.0 * s;
}

} // namespace rissim
