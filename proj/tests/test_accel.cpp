// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rissim/accel.hpp"
#include "rissim/sr.hpp"
#include "rissim/wsr.hpp"

using namespace rissim;
using Catch::Matchers::WithinAbs;

namespace {

// x -> x* + A (x - x*) with a slow, contracting A.
struct LinearMap {
    CVec xs;
    CMat A;
    CVec operator()(const CVec &x) const { return xs + A * (x - xs); }
    double f(const CVec &x) const { return -(x - xs).squaredNorm(); }
};

LinearMap slow_map(int n, std::mt19937_64 &g) {
    LinearMap m;
    m.xs = oracle::crandv(n, g);
    const CMat U = oracle::crandn(n, n, g).householderQr().householderQ();
    RVec d(n);
    for (int i = 0; i < n; ++i)
        d(i) = 0.9 + 0.09 * i / std::max(1, n - 1);
    m.A = U * d.cast<cd>().asDiagonal() * U.adjoint();
    return m;
}

} // namespace

TEST_CASE("a fixed point is returned unchanged") {
    std::mt19937_64 g(1);
    const CVec x0 = oracle::crandv(5, g);
    const auto r = squarem_wrap([](const CVec &x) { return x; }, [](const CVec &x) { return x; },
                                [](const CVec &x) { return -x.norm(); }, x0, 100, 1e-9);
    CHECK(r.x == x0);
    CHECK(r.log.converged);
    CHECK(r.log.map_evaluations == 2);
}

TEST_CASE("extrapolation speeds up a slow linear fixed-point map") {
    std::mt19937_64 g(2);
    const LinearMap m = slow_map(6, g);
    const CVec x0 = oracle::crandv(6, g);
    const PointMap id = [](const CVec &x) { return x; };
    const PointObjective f = [&](const CVec &x) { return m.f(x); };
    const auto acc = squarem_wrap(m, id, f, x0, 10000, 1e-12);

    // Plain iteration to the same accuracy.
    CVec x = x0;
    int plain = 0;
    while ((x - m.xs).norm() > (acc.x - m.xs).norm() && plain < 100000) {
        x = m(x);
        ++plain;
    }
    CHECK(acc.log.map_evaluations < plain);
    CHECK(acc.extrapolated > 0);
}

TEST_CASE("emitted objective never falls below the plain two-step point") {
    std::mt19937_64 g(3);
    const LinearMap m = slow_map(4, g);
    // A projection that sometimes ruins the extrapolated point.
    const PointMap clip = [&](const CVec &x) {
        CVec y = x;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            if (std::abs(y(i)) > 1.5)
                y(i) *= 3.0;
        return y;
    };
    std::vector<CVec> calls;
    const PointMap step = [&](const CVec &x) {
        calls.push_back(m(x));
        return calls.back();
    };
    const auto r = squarem_wrap(step, clip, [&](const CVec &x) { return m.f(x); }, 3.0 * oracle::crandv(4, g), 400,
                                1e-14);
    REQUIRE(calls.size() == 2 * static_cast<std::size_t>(r.cycles));
    for (int c = 0; c < r.cycles; ++c)
        CHECK(r.log.iters[c + 1].objective >= m.f(calls[2 * c + 1]));
}

TEST_CASE("flatten and unflatten round trip") {
    std::mt19937_64 g(4);
    Design d{oracle::crandn(3, 2, g), {oracle::crandv(4, g), oracle::crandv(2, g)}};
    const Design e = unflatten(flatten(d), d);
    CHECK(e.W == d.W);
    CHECK(e.theta[0] == d.theta[0]);
    CHECK(e.theta[1] == d.theta[1]);
    CHECK_THROWS(unflatten(CVec::Zero(3), d));

    SrDesign s{{oracle::crandn(2, 1, g), oracle::crandn(2, 2, g)}, oracle::crandv(5, g)};
    const SrDesign t = unflatten(flatten(s), s);
    CHECK(t.W[0] == s.W[0]);
    CHECK(t.W[1] == s.W[1]);
    CHECK(t.theta == s.theta);
}

TEST_CASE("accelerated solvers stay feasible and end no lower than they start") {
    SystemConfig c;
    c.ris_elements = {16};
    SolverOptions o;
    o.acceleration = Acceleration::squarem;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto ch = generate_channels_miso(c, seed);
        const auto topo = make_topology(c);
        const auto r = run_wsr_bmm(c, ch, topo, o, default_init(c, ch, seed));
        CHECK(r.log.iters.back().objective >= r.log.iters.front().objective);
        CHECK(power_feasible(r.design.W, c.power_w, {}, 1e-9));
        CHECK((r.design.theta[0].cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK(r.log.iters.back().objective == wsr_objective(r.design, ch, topo, c));
    }
    SystemConfig m;
    m.kind = SystemKind::mimo;
    m.K = 2;
    m.M = 2;
    m.rx_antennas = 2;
    m.ris_elements = {8};
    const auto ch = generate_channels_mimo(m, 1);
    const auto r = run_sr_bmm(m, ch, o, default_sr_init(m, ch, 1));
    CHECK(r.log.iters.back().objective >= r.log.iters.front().objective);
    for (const auto &W : r.design.W)
        CHECK(W.squaredNorm() <= m.power_w * (1 + 1e-9));
}
