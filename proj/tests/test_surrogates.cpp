// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "rissim/surrogates.hpp"
#include "rissim/wsr.hpp"

using namespace rissim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double rate(cd x, double y) { return std::log1p(std::norm(x) / y); }

double logdet_rate_ref(const CMat &X, const CMat &Y) {
    const CMat M = CMat::Identity(X.cols(), X.cols()) + X.adjoint() * Y.inverse() * X;
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (M + M.adjoint()));
    return es.eigenvalues().array().log().sum();
}

} // namespace

TEST_CASE("scalar rate minorizer: hand values") {
    const auto m = scalar_rate_minorizer(cd(1, 0), 1.0);
    CHECK_THAT(m(cd(1, 0), 1.0), WithinAbs(std::log(2.0), 1e-15));
    const double v = m(cd(2, 0), 1.0);
    CHECK_THAT(v, WithinAbs(-2.5 + 4.0 + std::log(2.0) - 1.0, 1e-14));
    CHECK(v <= std::log(5.0));
    const auto z = scalar_rate_minorizer(cd(0, 0), 2.0);
    CHECK(z(cd(3, 1), 0.5) == 0.0);
    CHECK_THROWS_AS(scalar_rate_minorizer(cd(1, 0), 0.0), std::invalid_argument);
}

TEST_CASE("scalar rate minorizer: lower bound, tangency and matching gradient") {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    for (int t = 0; t < 2000; ++t) {
        const cd xa = 2.0 * oracle::crandv(1, g)(0);
        const double ya = u(g);
        const auto m = scalar_rate_minorizer(xa, ya);
        CHECK_THAT(m(xa, ya), WithinAbs(rate(xa, ya), 1e-12));
        const cd x = 2.0 * oracle::crandv(1, g)(0);
        const double y = u(g);
        CHECK(m(x, y) <= rate(x, y) + 1e-12);
        if (t % 10 == 0) {
            for (cd dir : {cd(1, 0), cd(0, 1)}) {
                const double df = oracle::directional([&](double h) { return rate(xa + h * dir, ya); });
                const double dg = oracle::directional([&](double h) { return m(xa + h * dir, ya); });
                CHECK_THAT(dg, WithinAbs(df, 1e-6 * std::max(1.0, std::abs(df))));
            }
            const double df = oracle::directional([&](double h) { return rate(xa, ya + h); });
            const double dg = oracle::directional([&](double h) { return m(xa, ya + h); });
            CHECK_THAT(dg, WithinAbs(df, 1e-6 * std::max(1.0, std::abs(df))));
        }
    }
}

TEST_CASE("SINR minorizer: hand values and sampled lower bound") {
    const auto m = sinr_minorizer(cd(1, 0), 1.0);
    CHECK_THAT(m(cd(1, 0), 1.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(m(cd(2, 0), 1.0), WithinAbs(3.0, 1e-15));
    CHECK(sinr_minorizer(cd(0, 0), 1.0)(cd(1, 2), 3.0) == 0.0);
    CHECK_THROWS_AS(sinr_minorizer(cd(1, 0), -1.0), std::invalid_argument);

    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    for (int t = 0; t < 2000; ++t) {
        const cd za = oracle::crandv(1, g)(0);
        const double ya = u(g);
        const auto s = sinr_minorizer(za, ya);
        const cd z = oracle::crandv(1, g)(0);
        const double y = u(g);
        CHECK(s(z, y) <= std::norm(z) / y + 1e-12);
        CHECK_THAT(s(za, ya), WithinAbs(std::norm(za) / ya, 1e-12));
    }
}

TEST_CASE("quadratic-to-linear bound") {
    std::mt19937_64 g(3);
    // L = I with lambda = 1: equality everywhere.
    const CVec xa = oracle::crandv(4, g);
    const CVec x = oracle::crandv(4, g);
    CHECK_THAT(quadratic_majorizer_value(CMat::Identity(4, 4), 1.0, xa, x), WithinAbs(x.squaredNorm(), 1e-12));

    // Rank one with the norm shift.
    CVec v(2);
    v << cd(1, 0), cd(0, 1);
    const CMat L1 = v * v.adjoint();
    const CVec a2 = oracle::random_phases(2, g);
    CHECK_THAT(quadratic_majorizer_value(L1, 2.0, a2, a2), WithinAbs(a2.dot(L1 * a2).real(), 1e-12));
    for (int t = 0; t < 100; ++t) {
        const CVec y = oracle::crandv(2, g);
        CHECK(quadratic_majorizer_value(L1, 2.0, a2, y) >= y.dot(L1 * y).real() - 1e-10);
    }

    // Random Hermitian matrix with lambda = lambda_max; the linear form
    // lower-bounds -x^H L x on the unit-modulus set.
    const CMat H = oracle::crandn(5, 5, g);
    const CMat L = H + H.adjoint();
    const double lam = oracle::lambda_max(L);
    const CVec th = oracle::random_phases(5, g);
    const LinearizedForm f = quadratic_to_linear(L, lam, th);
    CHECK_THAT(f(th), WithinAbs(-th.dot(L * th).real(), 1e-10));
    for (int t = 0; t < 1000; ++t) {
        const CVec y = oracle::random_phases(5, g);
        CHECK(f(y) <= -y.dot(L * y).real() + 1e-10);
    }
    CHECK_THROWS_AS(quadratic_to_linear(L, lam - 1.0, th), std::invalid_argument);
}

TEST_CASE("matrix rate minorizer reduces to the scalar one") {
    const auto m = matrix_rate_minorizer(CMat::Ones(1, 1), CMat::Ones(1, 1));
    const auto s = scalar_rate_minorizer(cd(1, 0), 1.0);
    CHECK_THAT(m.A(0, 0).real(), WithinAbs(s.a, 1e-15));
    CHECK(std::abs(m.B(0, 0) - std::conj(s.b)) < 1e-15);
    CHECK_THAT(m.c0, WithinAbs(s.c0, 1e-15));
}

TEST_CASE("matrix rate minorizer: tangency and sampled lower bound") {
    std::mt19937_64 g(4);
    for (int t = 0; t < 200; ++t) {
        const CMat Xa = oracle::crandn(3, 2, g);
        const CMat Ya = oracle::random_psd(3, g, 0.2);
        const auto m = matrix_rate_minorizer(Xa, Ya);
        CHECK_THAT(m(Xa, Ya), WithinAbs(logdet_rate_ref(Xa, Ya), 1e-9));
        CHECK_THAT(logdet_rate(Xa, Ya), WithinAbs(logdet_rate_ref(Xa, Ya), 1e-10));
        for (int s = 0; s < 5; ++s) {
            const CMat X = oracle::crandn(3, 2, g);
            const CMat Y = oracle::random_psd(3, g, 0.2);
            CHECK(m(X, Y) <= logdet_rate_ref(X, Y) + 1e-9);
        }
    }
    CHECK_THROWS_AS(matrix_rate_minorizer(CMat::Ones(2, 1), CMat::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("rate and SINR surrogates in the received amplitudes") {
    std::mt19937_64 g(5);
    const int M = 3, K = 3;
    const double sigma2 = 0.3;
    RVec w(K);
    w << 1.0, 0.5, 2.0;
    const CMat Ha = oracle::crandn(M, K, g), Wa = oracle::crandn(M, K, g);
    const auto co = compute_wsr_coeffs(Wa, Ha, sigma2);
    const auto rs = rate_surrogate(co, w, sigma2);
    const auto ss = sinr_surrogate(Wa, Ha, sigma2, w);
    CHECK_THAT(surrogate_value(rs, Wa, Ha), WithinRel(wsr_objective(Wa, Ha, sigma2, w), 1e-12));
    CHECK_THAT(surrogate_value(ss, Wa, Ha), WithinRel(sinr_objective(Wa, Ha, sigma2, w), 1e-12));
    for (int t = 0; t < 500; ++t) {
        const CMat W = oracle::crandn(M, K, g);
        const CMat H = Ha + 0.5 * oracle::crandn(M, K, g);
        CHECK(surrogate_value(rs, W, H) <= wsr_objective(W, H, sigma2, w) + 1e-10);
        CHECK(surrogate_value(ss, W, H) <= sinr_objective(W, H, sigma2, w) + 1e-10);
    }
}
