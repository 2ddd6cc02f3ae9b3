// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "rissim/channel.hpp"
#include "rissim/wsr.hpp"

using namespace rissim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SystemConfig desk(int K = 4, int M = 4, std::vector<int> N = {16}) {
    SystemConfig c;
    c.K = K;
    c.M = M;
    c.ris_elements = std::move(N);
    return c;
}

// Every recorded objective, block by block, in order.
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

bool nondecreasing(const std::vector<double> &t, double rel) {
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] < t[i - 1] - rel * std::max(1.0, std::abs(t[i - 1])))
            return false;
    return true;
}

double surrogate_f(const CMat &R, const CMat &Q, const CMat &W) { return -oracle::shared_objective(R, Q, W); }

} // namespace

TEST_CASE("weighted sum-rate objective: hand cases") {
    CMat H(1, 2), W(1, 2);
    H << 1.0, 1.0;
    W << 1.0, 1.0;
    CHECK_THAT(wsr_objective(W, H, 1.0, RVec::Ones(2)), WithinAbs(2.0 * std::log(1.5), 1e-15));
    CMat h(2, 1), w(2, 1);
    h << 1.0, 0.0;
    w << 0.0, 1.0;
    CHECK(wsr_objective(w, h, 1.0, RVec::Ones(1)) == 0.0);
}

TEST_CASE("minorizer coefficients: hand cases") {
    const CMat one = CMat::Ones(1, 1);
    const auto a = compute_wsr_coeffs(one, one, 1.0);
    CHECK_THAT(a.sinr(0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(a.alpha(0), WithinAbs(0.5, 1e-15));
    CHECK(std::abs(a.beta(0) - cd(1, 0)) < 1e-15);

    const auto b = compute_wsr_coeffs(CMat::Ones(1, 2), CMat::Ones(1, 2), 1.0);
    for (int k = 0; k < 2; ++k) {
        CHECK_THAT(b.alpha(k), WithinAbs(1.0 / 6.0, 1e-15));
        CHECK(std::abs(b.beta(k) - cd(0.5, 0)) < 1e-15);
    }
    const auto z = compute_wsr_coeffs(CMat::Zero(2, 2), CMat::Ones(2, 2), 1.0);
    CHECK(z.alpha.isZero());
    CHECK(z.beta.isZero());
}

TEST_CASE("beamformer quadratic: hand case") {
    WsrCoeffs c{RVec::Constant(1, 0.5), CVec::Constant(1, cd(1, 0)), RVec::Zero(1), RVec::Zero(1)};
    CMat H = CMat::Zero(2, 1);
    H(0, 0) = 1.0;
    const auto q = build_w_quadratic(c, H, RVec::Ones(1));
    CMat ref = CMat::Zero(2, 2);
    ref(0, 0) = 0.5;
    CHECK((q.R - ref).norm() < 1e-15);
    WsrCoeffs zero{RVec::Zero(1), CVec::Zero(1), RVec::Zero(1), RVec::Zero(1)};
    CHECK(build_w_quadratic(zero, H, RVec::Ones(1)).R.isZero());
}

TEST_CASE("total-power beamformer: trivial cases") {
    std::mt19937_64 g(1);
    CHECK(solve_w_total_power(CMat::Identity(3, 3), CMat::Zero(3, 2), 1.0).isZero());
    const CMat Q = 0.3 * oracle::crandn(3, 2, g);
    REQUIRE(Q.squaredNorm() <= 1.0);
    CHECK((solve_w_total_power(CMat::Identity(3, 3), Q, 1.0) - Q).norm() < 1e-12);
}

TEST_CASE("total-power beamformer matches a projected-gradient oracle") {
    std::mt19937_64 g(2);
    for (int t = 0; t < 20; ++t) {
        const CMat R = oracle::random_psd(4, g, 0.05);
        const CMat Q = 3.0 * oracle::crandn(4, 3, g);
        const double P = 0.5;
        const CMat W = solve_w_total_power(R, Q, P);
        CHECK(W.squaredNorm() <= P * (1 + 1e-9));
        const CMat ref = oracle::projected_gradient({R, R, R}, Q, oracle::total_ball(4, P));
        CHECK_THAT(oracle::shared_objective(R, Q, W), WithinAbs(oracle::shared_objective(R, Q, ref), 1e-6));
    }
}

TEST_CASE("column beamformers with singular quadratics match the oracle") {
    std::mt19937_64 g(3);
    for (int t = 0; t < 10; ++t) {
        std::vector<CMat> R;
        for (int j = 0; j < 3; ++j) {
            const CVec h = oracle::crandv(4, g);
            R.push_back(h * h.adjoint()); // rank one
        }
        const CMat Q = oracle::crandn(4, 3, g);
        const CMat W = solve_w_columns_total(R, Q, 1.0);
        const CMat ref = oracle::projected_gradient(R, Q, oracle::total_ball(4, 1.0));
        CHECK(W.squaredNorm() <= 1.0 + 1e-9);
        CHECK_THAT(oracle::column_objective(R, Q, W), WithinAbs(oracle::column_objective(R, Q, ref), 1e-6));
    }
}

TEST_CASE("general power constraints") {
    std::mt19937_64 g(4);
    const CMat R = oracle::random_psd(3, g, 0.1);
    const CMat Q = 2.0 * oracle::crandn(3, 2, g);
    const std::vector<PowerConstraint> total{{CMat::Identity(3, 3), 0.7}};
    const CMat a = solve_w_general_power(R, Q, total);
    const CMat b = solve_w_total_power(R, Q, 0.7);
    CHECK(std::abs(oracle::shared_objective(R, Q, a) - oracle::shared_objective(R, Q, b)) < 1e-8);

    const CMat Qs = 1e-3 * Q;
    const CMat free = R.ldlt().solve(Qs);
    CHECK((solve_w_general_power(R, Qs, total) - free).norm() < 1e-9 * free.norm());
}

TEST_CASE("per-antenna and mixed constraints match a Dykstra projected-gradient oracle") {
    std::mt19937_64 g(5);
    for (int t = 0; t < 10; ++t) {
        const int M = 2 + t % 3;
        const CMat R = oracle::random_psd(M, g, 0.05);
        const CMat Q = 3.0 * oracle::crandn(M, 2, g);
        std::vector<PowerConstraint> cons;
        for (int m = 0; m < M; ++m) {
            CMat O = CMat::Zero(M, M);
            O(m, m) = 1.0;
            cons.push_back({O, 0.4 / M});
        }
        auto balls = oracle::per_antenna_balls(M, 0.4);
        if (t % 2) {
            // Tighter total budget on top of the per-antenna limits.
            cons.push_back({CMat::Identity(M, M), 0.3});
            balls.push_back(oracle::total_ball(M, 0.3)[0]);
        }
        const CMat W = solve_w_general_power(R, Q, cons);
        CHECK(power_feasible(W, 0.4, cons, 1e-7));
        const CMat ref = oracle::projected_gradient({R, R}, Q, balls);
        CHECK_THAT(oracle::shared_objective(R, Q, W), WithinAbs(oracle::shared_objective(R, Q, ref), 1e-5));
    }
}

TEST_CASE("per-antenna constraints with a rank-one quadratic") {
    std::mt19937_64 g(15);
    for (int M : {3, 4, 6}) {
        const CVec h = oracle::crandv(M, g);
        const CMat R = h * h.adjoint();
        const CMat Q = oracle::crandn(M, 2, g);
        std::vector<PowerConstraint> cons;
        for (int m = 0; m < M; ++m) {
            CMat O = CMat::Zero(M, M);
            O(m, m) = 1.0;
            cons.push_back({O, 0.5 / M});
        }
        const CMat W = solve_w_general_power(R, Q, cons);
        CHECK(power_feasible(W, 0.5, cons, 1e-9));
        const CMat ref = oracle::projected_gradient({R, R}, Q, oracle::per_antenna_balls(M, 0.5));
        CHECK_THAT(oracle::shared_objective(R, Q, W), WithinAbs(oracle::shared_objective(R, Q, ref), 1e-6));
    }
}

TEST_CASE("closed-form beamformer step") {
    std::mt19937_64 g(6);
    const double sigma2 = 0.5;
    const RVec w = RVec::Ones(3);
    const CMat H = oracle::crandn(4, 3, g);
    for (int t = 0; t < 20; ++t) {
        CMat Wa = oracle::crandn(4, 3, g);
        Wa *= std::sqrt(0.8 / Wa.squaredNorm());
        const auto co = compute_wsr_coeffs(Wa, H, sigma2);
        const auto q = build_w_quadratic(co, H, w);
        const CMat W = solve_w_closed_form(q.R, q.Q, co, Wa, H, w, 1.0);
        CHECK(W.squaredNorm() <= 1.0 + 1e-12);
        CHECK(surrogate_f(q.R, q.Q, W) >= surrogate_f(q.R, q.Q, Wa) - 1e-12);
        CHECK(wsr_objective(W, H, sigma2, w) >= wsr_objective(Wa, H, sigma2, w) - 1e-12);
    }
    // Fixed point: the anchor already solves the inner problem in the interior.
    const CMat R = oracle::random_psd(3, g, 1.0);
    const CMat Wf = 0.1 * oracle::crandn(3, 2, g);
    const CMat Wc = solve_w_closed_form_columns({R}, R * Wf, Wf, 10.0);
    CHECK((Wc - Wf).norm() < 1e-12);
    // Boundary scaling.
    const CMat Wb = solve_w_closed_form_columns({R}, 100.0 * R * Wf, Wf, 0.01);
    CHECK_THAT(Wb.squaredNorm(), WithinRel(0.01, 1e-12));
}

TEST_CASE("unit-modulus phase solver") {
    CVec b(1);
    b << cd(-1, 0);
    CHECK(std::abs(solve_theta_unimodulus(b)(0) - cd(1, 0)) < 1e-15);
    b << cd(0, 1);
    const CVec t = solve_theta_unimodulus(b);
    CHECK(std::abs(t(0) - cd(0, -1)) < 1e-15);
    CHECK_THAT((std::conj(t(0)) * b(0)).real(), WithinAbs(-1.0, 1e-15));

    std::mt19937_64 g(7);
    for (int r = 0; r < 20; ++r) {
        const CVec bb = oracle::crandv(8, g);
        const CVec th = solve_theta_unimodulus(bb);
        const double got = -th.dot(bb).real();
        const double grid = oracle::grid_phase_value(bb, 360);
        // Grid points lose at most 1 - cos(pi/360) per element.
        CHECK(got >= grid - 1e-12);
        CHECK(got <= grid + bb.cwiseAbs().sum() * (1.0 - std::cos(kPi / 360.0)) + 1e-12);
    }
}

TEST_CASE("discrete phase solver: alphabet hits, nearest point and ties") {
    const std::vector<double> two{0.0, kPi / 2, kPi, 3 * kPi / 2};
    CVec b(1);
    b << cd(1, 0);
    CHECK(std::abs(solve_theta_discrete(b, two)(0) - cd(-1, 0)) < 1e-15);
    b << std::polar(1.0, kPi / 3);
    CHECK(std::abs(solve_theta_discrete(b, two)(0) - std::polar(1.0, 3 * kPi / 2)) < 1e-15);
    b << cd(0, 1);
    CHECK(std::abs(solve_theta_discrete(b, {0.0, kPi})(0) - cd(1, 0)) < 1e-15);

    std::mt19937_64 g(8);
    for (int bits : {1, 2, 3}) {
        std::vector<double> alpha;
        for (int q = 0; q < (1 << bits); ++q)
            alpha.push_back(2 * kPi * q / (1 << bits));
        const CVec bb = oracle::crandv(8, g);
        const CVec th = solve_theta_discrete(bb, alpha);
        for (int n = 0; n < 8; ++n) {
            double best = -1e300;
            for (double a : alpha)
                best = std::max(best, -(std::conj(std::polar(1.0, a)) * bb(n)).real());
            CHECK_THAT(-(std::conj(th(n)) * bb(n)).real(), WithinAbs(best, 1e-15));
        }
    }
}

TEST_CASE("phase linearization: degenerate anchor, tangency and sampled lower bound") {
    const SystemConfig c = desk(3, 3, {6});
    const auto ch = generate_channels_miso(c, 2);
    const auto topo = make_topology(c);
    Design zero{CMat::Zero(3, 3), {CVec::Ones(6)}};
    const auto co0 = compute_wsr_coeffs(zero, ch, topo, c);
    CHECK(build_theta_linear(1, zero, co0, ch, topo, c).b.norm() == 0.0);

    std::mt19937_64 g(9);
    Design d = default_init(c, ch, 2);
    const auto co = compute_wsr_coeffs(d, ch, topo, c);
    const LinearizedForm f = build_theta_linear(1, d, co, ch, topo, c);
    const double obj = wsr_objective(d, ch, topo, c);
    CHECK_THAT(f(d.theta[0]), WithinAbs(obj, 1e-9 * obj));
    for (int t = 0; t < 1000; ++t) {
        Design x = d;
        x.theta[0] = oracle::random_phases(6, g);
        CHECK(f(x.theta[0]) <= wsr_objective(x, ch, topo, c) + 1e-9 * obj);
    }
}

TEST_CASE("serial phase update") {
    const SystemConfig c1 = desk(2, 2, {1});
    const auto ch1 = generate_channels_miso(c1, 3);
    const auto topo1 = make_topology(c1);
    const Design d1 = default_init(c1, ch1, 3);
    const auto co1 = compute_wsr_coeffs(d1, ch1, topo1, c1);
    const CVec par = solve_theta_unimodulus(build_theta_linear(1, d1, co1, ch1, topo1, c1).b);
    CHECK((update_theta_serial(1, d1, co1, ch1, topo1, c1) - par).norm() < 1e-12);

    const SystemConfig c = desk(3, 3, {8});
    const auto ch = generate_channels_miso(c, 4);
    const auto topo = make_topology(c);
    const Design d = default_init(c, ch, 4);
    const auto co = compute_wsr_coeffs(d, ch, topo, c);
    const auto s = rate_surrogate(co, user_weights(c), c.sigma2());
    const CVec ser = update_theta_serial(1, d, co, ch, topo, c);
    // Surrogate value after each single-element change never decreases.
    Design x = d;
    double prev = surrogate_value(s, x.W, effective_channels(x, ch, topo));
    for (int n = 0; n < 8; ++n) {
        x.theta[0](n) = ser(n);
        const double v = surrogate_value(s, x.W, effective_channels(x, ch, topo));
        CHECK(v >= prev - 1e-12 * std::abs(prev));
        prev = v;
    }
}

TEST_CASE("WSR solver: no-op, infeasible start and single-user closed form") {
    const SystemConfig c = desk();
    const auto ch = generate_channels_miso(c, 1);
    const auto topo = make_topology(c);
    const Design init = default_init(c, ch, 1);
    SolverOptions o;
    o.max_outer_iters = 0;
    const auto r = run_wsr_bmm(c, ch, topo, o, init);
    CHECK((r.design.W - init.W).norm() == 0.0);
    REQUIRE(r.log.iters.size() == 1);
    CHECK(r.log.iters[0].objective == wsr_objective(init, ch, topo, c));

    Design bad = init;
    bad.W *= 10.0;
    CHECK_THROWS_AS(run_wsr_bmm(c, ch, topo, SolverOptions{}, bad), std::invalid_argument);

    const SystemConfig c1 = desk(1, 4, {16});
    std::mt19937_64 g(10);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto ch1 = generate_channels_miso(c1, seed);
        Design x = default_init(c1, ch1, seed);
        x.W = oracle::crandn(4, 1, g);
        x.W *= std::sqrt(0.5 * c1.power_w / x.W.squaredNorm());
        SolverOptions so;
        so.rel_tol = 1e-12;
        const auto res = run_wsr_bmm(c1, ch1, no_reflection_topology(1), so, x);
        const double ref = std::log1p(c1.power_w * ch1.hd[0].squaredNorm() / c1.sigma2());
        CHECK_THAT(res.log.iters.back().objective, WithinAbs(ref, 1e-6));
    }
}

TEST_CASE("WSR solver variants are monotone per block") {
    struct Variant {
        const char *name;
        std::function<void(SystemConfig &, SolverOptions &)> set;
    };
    const std::vector<Variant> variants{
        {"parallel", [](SystemConfig &, SolverOptions &) {}},
        {"serial", [](SystemConfig &, SolverOptions &o) { o.theta_update = ThetaUpdate::serial; }},
        {"closed form", [](SystemConfig &, SolverOptions &o) { o.w_update = WUpdate::closed_form; }},
        {"per antenna", [](SystemConfig &c, SolverOptions &) { c.power_model = PowerModel::per_antenna; }},
        {"per antenna closed form",
         [](SystemConfig &c, SolverOptions &o) {
             c.power_model = PowerModel::per_antenna;
             o.w_update = WUpdate::closed_form;
         }},
        {"2-bit", [](SystemConfig &c, SolverOptions &) { c.phase_bits = 2; }},
        {"1-bit serial",
         [](SystemConfig &c, SolverOptions &o) {
             c.phase_bits = 1;
             o.theta_update = ThetaUpdate::serial;
         }},
        {"SINR objective", [](SystemConfig &, SolverOptions &o) { o.objective = ObjectiveKind::sinr; }},
        {"two RIS, all paths",
         [](SystemConfig &c, SolverOptions &) {
             c.ris_elements = {8, 8};
             c.topology = TopologyKind::paths;
         }},
        {"three RIS cascade", [](SystemConfig &c, SolverOptions &) { c.ris_elements = {4, 4, 4}; }},
        {"general power",
         [](SystemConfig &c, SolverOptions &) {
             c.power_model = PowerModel::general;
             CMat O = CMat::Identity(4, 4);
             O(0, 0) = 3.0;
             c.general_power = {{O, 1e-3}, {CMat::Identity(4, 4), 0.8e-3}};
         }},
        {"weights", [](SystemConfig &c, SolverOptions &) { c.weights = {1.0, 2.0, 0.5, 1.0}; }},
    };
    for (const auto &v : variants) {
        DYNAMIC_SECTION(v.name) {
            for (std::uint64_t seed = 1; seed <= 4; ++seed) {
                SystemConfig c = desk();
                SolverOptions o;
                o.max_outer_iters = 60;
                v.set(c, o);
                const auto ch = generate_channels_miso(c, seed);
                const auto topo = make_topology(c);
                const auto r = run_wsr_bmm(c, ch, topo, o, default_init(c, ch, seed));
                CHECK(nondecreasing(trace(r.log), 1e-9));
                CHECK(r.log.iters.back().objective >= r.log.iters.front().objective);
                CHECK(power_feasible(r.design.W, c.power_w, power_constraints(c, c.M, c.power_w), 1e-7));
                for (const auto &t : r.design.theta)
                    CHECK((t.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
                CHECK_THAT(r.log.iters.back().objective,
                           WithinRel(miso_objective(r.design, ch, topo, c, o.objective), 1e-12));
            }
        }
    }
}

TEST_CASE("closed-form update rejects a general weighting matrix") {
    SystemConfig c = desk();
    c.power_model = PowerModel::general;
    CMat O = CMat::Identity(4, 4);
    O(0, 1) = 0.5;
    O(1, 0) = 0.5;
    c.general_power = {{O, 1e-3}};
    SolverOptions o;
    o.w_update = WUpdate::closed_form;
    const auto ch = generate_channels_miso(c, 1);
    CHECK_THROWS_AS(run_wsr_bmm(c, ch, make_topology(c), o, default_init(c, ch, 1)), std::invalid_argument);
}

TEST_CASE("discrete phases stay on the alphabet") {
    SystemConfig c = desk();
    c.phase_bits = 2;
    const auto ch = generate_channels_miso(c, 5);
    const auto r = run_wsr_bmm(c, ch, make_topology(c), SolverOptions{}, default_init(c, ch, 5));
    for (Eigen::Index n = 0; n < r.design.theta[0].size(); ++n) {
        const double a = std::arg(r.design.theta[0](n));
        const double q = a / (kPi / 2);
        CHECK(std::abs(q - std::round(q)) < 1e-12);
    }
}
