// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "rissim/sr.hpp"
#include "rissim/wsr.hpp"

using namespace rissim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SystemConfig mimo(int K = 3, int Mt = 2, int Mr = 2, int N = 16) {
    SystemConfig c;
    c.kind = SystemKind::mimo;
    c.K = K;
    c.M = Mt;
    c.rx_antennas = Mr;
    c.ris_elements = {N};
    return c;
}

// A MIMO channel set with chosen dimensions and unit-variance entries.
ChannelSetMimo random_mimo(int K, int Mt, int Mr, int N, std::mt19937_64 &g) {
    ChannelSetMimo ch;
    ch.Hd.assign(K, {});
    for (int k = 0; k < K; ++k) {
        ch.Hr.push_back(oracle::crandn(Mr, N, g));
        ch.Gt.push_back(oracle::crandn(N, Mt, g));
        for (int j = 0; j < K; ++j)
            ch.Hd[k].push_back(oracle::crandn(Mr, Mt, g));
    }
    return ch;
}

SrDesign random_design(int K, int Mt, int d, int N, double P, std::mt19937_64 &g) {
    SrDesign x;
    for (int k = 0; k < K; ++k) {
        CMat W = oracle::crandn(Mt, d, g);
        x.W.push_back(W * std::sqrt(P / W.squaredNorm()));
    }
    x.theta = oracle::random_phases(N, g);
    return x;
}

std::vector<double> trace(const IterationLog &log) {
    std::vector<double> t;
    for (const auto &r : log.iters) {
        if (r.block_objectives.empty())
            t.push_back(r.objective);
        for (double b : r.block_objectives)
            t.push_back(b);
    }
    return t;
}

} // namespace

TEST_CASE("sum-rate objective: hand cases") {
    SystemConfig c = mimo(1, 2, 2, 1);
    c.noise.sigma2_w = 1.0;
    ChannelSetMimo ch;
    ch.Hr = {CMat::Zero(2, 1)};
    ch.Gt = {CMat::Zero(1, 2)};
    ch.Hd = {{CMat::Identity(2, 2)}};
    SrDesign d{{CMat::Identity(2, 2)}, CVec::Ones(1)};
    CHECK_THAT(sr_objective(d, ch, c), WithinAbs(2.0 * std::log(2.0), 1e-14));
    d.W[0].setZero();
    CHECK(sr_objective(d, ch, c) == 0.0);
}

TEST_CASE("scalar dimensions reduce to the MISO rate") {
    std::mt19937_64 g(1);
    SystemConfig c = mimo(3, 1, 1, 4);
    c.noise.sigma2_w = 0.3;
    const auto ch = random_mimo(3, 1, 1, 4, g);
    const SrDesign d = random_design(3, 1, 1, 4, 1.0, g);
    CMat W(1, 3);
    for (int k = 0; k < 3; ++k)
        W(0, k) = d.W[k](0, 0);
    // One antenna per terminal: every link is a scalar gain.
    double ref = 0.0;
    const auto links = mimo_links(d.theta, ch);
    for (int k = 0; k < 3; ++k) {
        double inter = 0.3;
        for (int j = 0; j < 3; ++j)
            if (j != k)
                inter += std::norm(links[k][j](0, 0) * W(0, j));
        ref += std::log1p(std::norm(links[k][k](0, 0) * W(0, k)) / inter);
    }
    CHECK_THAT(sr_objective(d, ch, c), WithinRel(ref, 1e-12));

    const SrCoeffs co = compute_sr_coeffs(d, ch, c);
    for (int k = 0; k < 3; ++k) {
        const cd x = links[k][k](0, 0) * W(0, k);
        const double y = interference_covariance(k, d, links, 0.3)(0, 0).real();
        const auto s = scalar_rate_minorizer(x, y);
        CHECK_THAT(co.A[k](0, 0).real(), WithinRel(s.a, 1e-12));
        CHECK(std::abs(co.B[k](0, 0) - std::conj(s.b)) < 1e-12 * std::abs(s.b));
    }
}

TEST_CASE("surrogate is tangent and below the sum rate") {
    std::mt19937_64 g(2);
    SystemConfig c = mimo(3, 2, 2, 6);
    c.noise.sigma2_w = 0.5;
    const auto ch = random_mimo(3, 2, 2, 6, g);
    const SrDesign d = random_design(3, 2, 2, 6, 1.0, g);
    const SrCoeffs co = compute_sr_coeffs(d, ch, c);
    CHECK_THAT(sr_surrogate_value(co, d, ch, 0.5), WithinRel(sr_objective(d, ch, c), 1e-10));
    for (int t = 0; t < 300; ++t) {
        const SrDesign x = random_design(3, 2, 2, 6, 1.0, g);
        CHECK(sr_surrogate_value(co, x, ch, 0.5) <= sr_objective(x, ch, c) + 1e-9);
    }
}

TEST_CASE("per-pair beamformer quadratic") {
    std::mt19937_64 g(3);
    SystemConfig c = mimo(1, 2, 3, 4);
    c.noise.sigma2_w = 1.0;
    const auto ch = random_mimo(1, 2, 3, 4, g);
    const SrDesign d = random_design(1, 2, 2, 4, 1.0, g);
    const SrCoeffs co = compute_sr_coeffs(d, ch, c);
    const WkQuadratic q = build_wk_quadratic(0, co, ch, d);
    const CMat H = mimo_link(0, 0, d.theta, ch);
    CHECK((q.R - H.adjoint() * co.A[0] * H).norm() < 1e-12 * q.R.norm());

    SrCoeffs z = co;
    z.A[0].setZero();
    CHECK(build_wk_quadratic(0, z, ch, d).R.isZero());
}

TEST_CASE("phase quadratic equals the direct expansion of the surrogate") {
    std::mt19937_64 g(4);
    for (int N : {1, 5}) {
        SystemConfig c = mimo(3, 2, 2, N);
        c.noise.sigma2_w = 0.5;
        const auto ch = random_mimo(3, 2, 2, N, g);
        const SrDesign d = random_design(3, 2, 2, N, 1.0, g);
        const SrCoeffs co = compute_sr_coeffs(d, ch, c);
        const SrThetaQuadratic q = build_theta_quadratic(co, ch, d, 0.5);
        CHECK((q.L - q.L.adjoint()).norm() < 1e-12 * std::max(1.0, q.L.norm()));
        for (int t = 0; t < 100; ++t) {
            SrDesign x = d;
            x.theta = oracle::random_phases(N, g);
            const double direct = sr_surrogate_value(co, x, ch, 0.5);
            CHECK_THAT(sr_theta_quadratic_value(q, x.theta), WithinAbs(direct, 1e-9 * std::max(1.0, std::abs(direct))));
        }
    }
}

TEST_CASE("phase linearization") {
    std::mt19937_64 g(5);
    SystemConfig c = mimo(2, 2, 2, 6);
    c.noise.sigma2_w = 0.5;
    const auto ch = random_mimo(2, 2, 2, 6, g);
    const SrDesign d = random_design(2, 2, 2, 6, 1.0, g);
    const SrCoeffs co = compute_sr_coeffs(d, ch, c);
    SrThetaQuadratic q = build_theta_quadratic(co, ch, d, 0.5);
    const double lam = oracle::lambda_max(q.L);
    const LinearizedForm f = linearize_theta_sr(q, d.theta, lam);
    CHECK_THAT(f(d.theta), WithinAbs(sr_theta_quadratic_value(q, d.theta), 1e-9));
    for (int t = 0; t < 500; ++t) {
        const CVec th = oracle::random_phases(6, g);
        CHECK(f(th) <= sr_theta_quadratic_value(q, th) + 1e-9);
    }
    // L = lambda I: the shift cancels.
    SrThetaQuadratic s = q;
    s.L = 2.0 * CMat::Identity(6, 6);
    const LinearizedForm fs = linearize_theta_sr(s, d.theta, 2.0);
    CHECK((fs.b + q.Nmat.diagonal().conjugate()).norm() < 1e-14 * std::max(1.0, q.Nmat.norm()));
}

TEST_CASE("SR solver: no-op and infeasible start") {
    const SystemConfig c = mimo();
    const auto ch = generate_channels_mimo(c, 1);
    const SrDesign init = default_sr_init(c, ch, 1);
    SolverOptions o;
    o.max_outer_iters = 0;
    const auto r = run_sr_bmm(c, ch, o, init);
    CHECK(r.log.iters.size() == 1);
    for (std::size_t k = 0; k < init.W.size(); ++k)
        CHECK((r.design.W[k] - init.W[k]).norm() == 0.0);
    CHECK((r.design.theta - init.theta).norm() == 0.0);
    SrDesign bad = init;
    bad.W[0] *= 10.0;
    CHECK_THROWS_AS(run_sr_bmm(c, ch, SolverOptions{}, bad), std::invalid_argument);
}

TEST_CASE("SR solver variants are monotone") {
    SystemConfig c = mimo();
    SolverOptions o;
    o.max_outer_iters = 40;
    SECTION("parallel phases") {}
    SECTION("serial phases") { o.theta_update = ThetaUpdate::serial; }
    SECTION("1-bit phases") { c.phase_bits = 1; }
    SECTION("single stream") { c.streams = 1; }
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto ch = generate_channels_mimo(c, seed);
        const auto r = run_sr_bmm(c, ch, o, default_sr_init(c, ch, seed));
        const auto t = trace(r.log);
        for (std::size_t i = 1; i < t.size(); ++i)
            CHECK(t[i] >= t[i - 1] - 1e-9 * std::max(1.0, std::abs(t[i - 1])));
        for (const auto &W : r.design.W)
            CHECK(W.squaredNorm() <= c.power_w * (1 + 1e-9));
        CHECK((r.design.theta.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK_THAT(r.log.iters.back().objective, WithinRel(sr_objective(r.design, ch, c), 1e-12));
    }
}
