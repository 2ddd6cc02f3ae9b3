// SPDX-License-Identifier: Apache-2.0
// ris-sim: Monte-Carlo driver for the BMM beamforming solvers.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rissim/harness/config.hpp"
#include "rissim/harness/emit.hpp"
#include "rissim/harness/monte_carlo.hpp"
#include "rissim/kernels.hpp"

using namespace rissim;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitTrials = 2;

struct RunArgs {
    std::string config;
    std::string solver = "wsr";
    std::optional<int> trials;
    std::uint64_t seed = 1;
    std::string profile = "desk";
    std::string theta_update = "parallel";
    std::string w_update = "linesearch";
    std::optional<std::string> power;
    std::optional<int> phase_bits;
    std::string accel = "off";
    std::optional<std::string> topology;
    std::string objective = "rate";
    int max_iters = 1000;
    double tol = 1e-6;
    std::string out, svg;
    bool zero_time = false;
};

int run(const RunArgs &a) {
    SystemConfig cfg;
    SolverId solver;
    SolverOptions opts;
    const Profile profile = a.profile == "full" ? Profile::full : Profile::desk;
    try {
        cfg = a.config.empty() ? config_from_json(nlohmann::json::object(), profile) : load_config(a.config, profile);
        if (a.power)
            cfg.power_model = *a.power == "per-antenna" ? PowerModel::per_antenna : PowerModel::total;
        if (a.phase_bits)
            cfg.phase_bits = *a.phase_bits;
        if (a.topology)
            cfg.topology = *a.topology == "paths" ? TopologyKind::paths : TopologyKind::cascade;
        validate(cfg);
        solver = parse_solver(a.solver);
        opts.theta_update = a.theta_update == "serial" ? ThetaUpdate::serial : ThetaUpdate::parallel;
        opts.w_update = a.w_update == "closed-form" ? WUpdate::closed_form : WUpdate::linesearch;
        opts.acceleration = a.accel == "squarem" ? Acceleration::squarem : Acceleration::off;
        opts.objective = a.objective == "sinr" ? ObjectiveKind::sinr : ObjectiveKind::rate;
        opts.max_outer_iters = a.max_iters;
        opts.rel_tol = a.tol;
    } catch (const std::exception &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    const int trials = a.trials ? *a.trials : default_trials(profile);
    MonteCarloResult mc;
    try {
        mc = monte_carlo(cfg, solver, trials, a.seed, opts);
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (a.zero_time) {
        for (auto &t : mc.trials) {
            t.time_ms = 0.0;
            for (auto &r : t.log.iters)
                r.time_ms = 0.0;
        }
        mc.stats = summarize(mc.trials);
    }

    try {
        if (!a.out.empty())
            write_text(a.out, csv_text(mc.trials));
        if (!a.svg.empty())
            write_text(a.svg, svg_text(mc.trials));
    } catch (const std::exception &e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kExitTrials;
    }

    for (const auto &t : mc.trials)
        if (!t.ok)
            std::cerr << "trial " << t.trial << " (seed " << t.seed << ") failed: " << t.error << '\n';
    const MonteCarloStats &s = mc.stats;
    std::printf("solver=%s trials=%d ok=%d failed=%d mean=%.6f stddev=%.6f time_ms=%.2f isa=%s\n",
                solver_name(solver).c_str(), trials, s.succeeded, s.failed, s.mean, s.stddev, s.time_mean_ms,
                kernels::isa_name(kernels::active_isa()));
    return s.failed ? kExitTrials : 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"RIS-aided beamforming simulator (block minorization-maximization)"};
    app.require_subcommand(1);
    RunArgs a;
    CLI::App *r = app.add_subcommand("run", "run Monte-Carlo trials");
    r->add_option("--config", a.config, "JSON config file (omitted: defaults of the profile)");
    r->add_option("--solver", a.solver, "wsr | mr | sr | random-phase | no-ris")
        ->check(CLI::IsMember({"wsr", "mr", "sr", "random-phase", "no-ris"}));
    r->add_option("--trials", a.trials, "number of channel realizations")->check(CLI::PositiveNumber);
    r->add_option("--seed", a.seed, "base seed; trial i uses seed + i");
    r->add_option("--profile", a.profile, "desk (N=16, 20 trials) | full (N=100, 100 trials)")
        ->check(CLI::IsMember({"desk", "full"}));
    r->add_option("--theta-update", a.theta_update)->check(CLI::IsMember({"parallel", "serial"}));
    r->add_option("--w-update", a.w_update)->check(CLI::IsMember({"linesearch", "closed-form"}));
    r->add_option("--power", a.power)->check(CLI::IsMember({"total", "per-antenna"}));
    r->add_option("--phase-bits", a.phase_bits)->check(CLI::Range(1, 16));
    r->add_option("--accel", a.accel)->check(CLI::IsMember({"off", "squarem"}));
    r->add_option("--topology", a.topology)->check(CLI::IsMember({"cascade", "paths"}));
    r->add_option("--objective", a.objective, "rate | sinr (MISO solvers)")->check(CLI::IsMember({"rate", "sinr"}));
    r->add_option("--max-iters", a.max_iters)->check(CLI::NonNegativeNumber);
    r->add_option("--tol", a.tol, "relative objective change for convergence")->check(CLI::PositiveNumber);
    r->add_option("--out", a.out, "CSV output path");
    r->add_option("--svg", a.svg, "SVG output path");
    r->add_flag("--zero-time", a.zero_time, "write 0 for timings so outputs are byte-reproducible");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    return run(a);
}
